#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "gibbslab/environment.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/model.hpp"
#include "support/brute.hpp"

using namespace gibbslab;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("rem features are scaled indicators") {
    const auto model = ModelSpec::rem(2);
    CHECK(model.kind() == ModelKind::Rem);
    CHECK(model.feature_count() == 4);
    for (std::uint64_t bits = 0; bits < 4; ++bits) {
        const auto phi = model.feature_vector(StateId::spins(bits, 2));
        REQUIRE(phi.size() == 4);
        for (std::uint64_t i = 0; i < 4; ++i)
            CHECK(phi[i] == doctest::Approx(i == bits ? std::sqrt(2.0) : 0.0));
    }
    const auto env = sample_environment(model, 99);
    for (std::uint64_t bits = 0; bits < 4; ++bits)
        CHECK(model.hamiltonian(env, StateId::spins(bits, 2)) ==
              doctest::Approx(std::sqrt(2.0) * env.g[bits]).epsilon(1e-14));

    CHECK(model.overlap(StateId::spins(1, 2), StateId::spins(1, 2)) == doctest::Approx(1.0));
    CHECK(model.overlap(StateId::spins(1, 2), StateId::spins(2, 2)) == doctest::Approx(0.0));
    CHECK(model.metric_rho(StateId::spins(1, 2), StateId::spins(2, 2)) == doctest::Approx(1.0));
}

TEST_CASE("spin mixture features match the tuple convention") {
    // pure two-body on two spins: phi_(i,j) = sigma_i sigma_j / sqrt(2)
    const auto model = ModelSpec::p_spin(2, MixedXi({{2, 1.0}}));
    CHECK(model.feature_count() == 4);
    const double c = 1.0 / std::sqrt(2.0);
    const auto s = StateId::spins(0b01, 2);  // sigma_0 = +1, sigma_1 = -1
    const auto phi = model.feature_vector(s);
    REQUIRE(phi.size() == 4);
    // tuple index t encodes factors least significant first: t = i + 2*j
    CHECK(phi[0] == doctest::Approx(c));        // (0,0): +1*+1
    CHECK(phi[1] == doctest::Approx(-c));       // (1,0): -1*+1
    CHECK(phi[2] == doctest::Approx(-c));       // (0,1)
    CHECK(phi[3] == doctest::Approx(c));        // (1,1)

    const auto xi = model.xi();
    CHECK(model.overlap(StateId::spins(0, 2), StateId::spins(3, 2)) == doctest::Approx(xi(-1.0)));
    CHECK(model.overlap(StateId::spins(0, 2), StateId::spins(1, 2)) == doctest::Approx(xi(0.0)));
    CHECK(model.spin_overlap_from_bits(0b00, 0b01) == doctest::Approx(xi(0.0)));
    CHECK(model.spin_overlap_from_bits(0b00, 0b11) == doctest::Approx(xi(-1.0)));
}

TEST_CASE("polymer features index time and site") {
    const auto model = ModelSpec::polymer(2, WalkKernel::simple_random_walk(1));
    const auto box = model.box();
    CHECK(box.side() == 5);
    CHECK(model.feature_count() == 10);

    const auto rr = StateId::parse_path("RR", 1);
    const auto phi = model.feature_vector(rr);
    std::vector<std::size_t> hot;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (phi[i] != 0.0) hot.push_back(i);
    CHECK(hot == std::vector<std::size_t>{3, 9});
    CHECK(phi[3] == doctest::Approx(1.0));
    CHECK(model.polymer_feature_index(1, {1, 0, 0}) == 3);
    CHECK(model.polymer_feature_index(2, {2, 0, 0}) == 9);

    const auto rl = StateId::parse_path("RL", 1);
    CHECK(model.overlap(rr, rl) == doctest::Approx(0.5));
    CHECK(model.overlap(rr, rr) == doctest::Approx(1.0));
    CHECK(model.metric_rho(rr, rl) == doctest::Approx(0.5));

    CHECK_THROWS_AS(model.polymer_feature_index(0, {0, 0, 0}), ValidationError);
    CHECK_THROWS_AS(model.polymer_feature_index(3, {0, 0, 0}), ValidationError);
}

TEST_CASE("feature norm is n for every state") {
    const auto check_model = [](const ModelSpec& model) {
        for (const auto& s : brute::all_states(model)) {
            const auto phi = model.feature_vector(s);
            CHECK(dot(phi, phi) == doctest::Approx(static_cast<double>(model.n())).epsilon(1e-12));
        }
    };
    check_model(ModelSpec::rem(3));
    check_model(ModelSpec::p_spin(4, MixedXi({{2, 1.0}, {3, 0.7}})));
    check_model(ModelSpec::polymer(3, WalkKernel::simple_random_walk(2)));
    check_model(ModelSpec::polymer(4, WalkKernel::simple_random_walk(1), {{0, 0, 0}}));
}

TEST_CASE("overlap equals normalized feature inner product") {
    const auto check_model = [](const ModelSpec& model) {
        const auto states = brute::all_states(model);
        for (const auto& a : states) {
            const auto pa = model.feature_vector(a);
            for (const auto& b : states) {
                const auto pb = model.feature_vector(b);
                CHECK(model.overlap(a, b) ==
                      doctest::Approx(dot(pa, pb) / model.n()).epsilon(1e-12));
            }
        }
    };
    check_model(ModelSpec::rem(2));
    check_model(ModelSpec::p_spin(3, MixedXi({{2, 1.0}, {3, 0.5}})));
    check_model(ModelSpec::polymer(3, WalkKernel::simple_random_walk(1)));
}

TEST_CASE("endpoint admission") {
    const auto w1 = WalkKernel::simple_random_walk(1);
    CHECK_NOTHROW(ModelSpec::polymer(3, w1, {{3, 0, 0}}));
    CHECK_NOTHROW(ModelSpec::polymer(3, w1, {{-1, 0, 0}}));
    CHECK_THROWS_AS(ModelSpec::polymer(3, w1, {{2, 0, 0}}), ValidationError);   // parity
    CHECK_THROWS_AS(ModelSpec::polymer(3, w1, {{5, 0, 0}}), ValidationError);   // too far
    CHECK_THROWS_AS(ModelSpec::polymer(3, w1, {{1, 1, 0}}), ValidationError);   // axis beyond dim
    CHECK_NOTHROW(ModelSpec::polymer(4, WalkKernel::simple_random_walk(2), {{1, 1, 0}}));
}

TEST_CASE("state validation") {
    const auto rem = ModelSpec::rem(3);
    CHECK_NOTHROW(rem.validate_state(StateId::spins(5, 3)));
    CHECK_THROWS_AS(rem.validate_state(StateId::spins(1, 2)), ValidationError);
    CHECK_THROWS_AS(rem.validate_state(StateId::path(1, {0})), ValidationError);

    const auto poly = ModelSpec::polymer(2, WalkKernel::simple_random_walk(2));
    CHECK_NOTHROW(poly.validate_state(StateId::parse_path("RU", 2)));
    CHECK_THROWS_AS(poly.validate_state(StateId::parse_path("R", 1)), ValidationError);
    CHECK_THROWS_AS(poly.validate_state(StateId::parse_path("RUR", 2)), ValidationError);
    CHECK_THROWS_AS(poly.validate_state(StateId::spins(0, 2)), ValidationError);

    const auto pinned = ModelSpec::polymer(2, WalkKernel::simple_random_walk(1), {{0, 0, 0}});
    CHECK_NOTHROW(pinned.validate_state(StateId::parse_path("RL", 1)));
    CHECK_THROWS_AS(pinned.validate_state(StateId::parse_path("RR", 1)), ValidationError);

    CHECK(rem.parse_state("101") == StateId::spins(0b101, 3));
    CHECK(poly.parse_state("UD") == StateId::parse_path("UD", 2));
}

TEST_CASE("environment validation and determinism") {
    const auto model = ModelSpec::p_spin(3, MixedXi({{2, 1.0}}));
    const auto env = sample_environment(model, 12345, 7);
    CHECK(env.g.size() == static_cast<std::size_t>(model.feature_count()));
    CHECK(env.seed == 12345);
    CHECK(env.replica_id == 7);
    CHECK_NOTHROW(model.validate_environment(env));

    Environment wrong = env;
    wrong.g.pop_back();
    CHECK_THROWS_AS(model.validate_environment(wrong), ValidationError);

    const auto again = sample_environment(model, 12345, 7);
    CHECK(env.g == again.g);
    const auto other = sample_environment(model, 12345, 8);
    CHECK(env.g != other.g);
}

TEST_CASE("environment entries look standard normal") {
    const auto model = ModelSpec::rem(14);
    const auto env = sample_environment(model, 31);
    double sum = 0.0, sq = 0.0;
    for (const double g : env.g) {
        sum += g;
        sq += g * g;
    }
    const auto m = static_cast<double>(env.g.size());
    CHECK(std::abs(sum / m) < 5.0 / std::sqrt(m));
    CHECK(std::abs(sq / m - 1.0) < 8.0 / std::sqrt(m));
}

TEST_CASE("size caps") {
    CHECK_THROWS_AS(ModelSpec::rem(21), BudgetError);
    CHECK_THROWS_AS(ModelSpec::p_spin(33, MixedXi({{2, 1.0}})), BudgetError);
    CHECK_THROWS_AS(ModelSpec::polymer(65, WalkKernel::simple_random_walk(1)), BudgetError);
    CHECK_THROWS_AS(ModelSpec::polymer(40, WalkKernel::simple_random_walk(3)), BudgetError);
    CHECK_THROWS_AS(ModelSpec::rem(0), ValidationError);
}

TEST_CASE("kind names") {
    CHECK(to_string(ModelKind::Rem) == "rem");
    CHECK(to_string(ModelKind::PSpin) == "pspin");
    CHECK(to_string(ModelKind::Polymer) == "polymer");
}
