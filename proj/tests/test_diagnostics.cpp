#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "gibbslab/diagnostics.hpp"
#include "gibbslab/environment.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/sampling.hpp"
#include "support/brute.hpp"

using namespace gibbslab;

TEST_CASE("low-overlap set mass matches enumeration") {
    const auto check = [](const ModelSpec& model, std::uint64_t seed, double beta) {
        const auto env = sample_environment(model, seed);
        const ExactGibbs engine(model, env, beta);
        const auto ref = brute::reference_gibbs(model, env, beta);
        double prev = -1.0;
        for (const double delta : {0.0, 0.05, 0.2, 0.5, 0.9, 1.0}) {
            const auto est = a_delta_mass(engine, delta);
            CHECK(est.exact);
            CHECK(est.se == 0.0);
            double mass = 0.0;
            for (std::size_t i = 0; i < ref.states.size(); ++i)
                if (brute::conditional_overlap(model, ref, ref.states[i]) <= delta)
                    mass += ref.probs[i];
            CHECK(est.value == doctest::Approx(mass).epsilon(1e-9));
            CHECK(est.value >= prev - 1e-12);
            prev = est.value;
        }
        CHECK(a_delta_mass(engine, 1.0).value == doctest::Approx(1.0).epsilon(1e-12));
    };
    check(ModelSpec::rem(6), 301, 1.4);
    check(ModelSpec::p_spin(5, MixedXi({{2, 1.0}, {3, 0.6}})), 303, 1.1);
    check(ModelSpec::polymer(6, WalkKernel::simple_random_walk(1)), 307, 1.2);
    check(ModelSpec::polymer(4, WalkKernel::simple_random_walk(2), {{0, 2, 0}}), 311, 0.9);
}

TEST_CASE("sampled set mass tracks the exact value") {
    const auto model = ModelSpec::rem(8);
    const auto env = sample_environment(model, 313);
    const ExactGibbs engine(model, env, 1.5);
    const double delta = 0.3;
    const auto exact = a_delta_mass(engine, delta);
    SamplerConfig cfg{17, 0, 20000, std::nullopt};
    const auto sampled = a_delta_mass(engine, delta, cfg);
    CHECK(!sampled.exact);
    CHECK(sampled.se > 0.0);
    CHECK(std::abs(sampled.value - exact.value) <= 4.0 * sampled.se + 1e-6);
    CHECK_THROWS_AS(a_delta_mass(engine, -0.1), ValidationError);
}

TEST_CASE("mean-overlap indicator") {
    const auto model = ModelSpec::rem(7);
    const auto env = sample_environment(model, 317);
    const ExactGibbs engine(model, env, 1.0);
    const double r = engine.mean_overlap();
    REQUIRE(r > 0.0);
    CHECK(b_delta_indicator(engine, r * 1.01));
    CHECK(!b_delta_indicator(engine, r * 0.99));
    CHECK_THROWS_AS(b_delta_indicator(engine, -1.0), ValidationError);
}

TEST_CASE("ball cover mass matches a test-side recomputation") {
    const auto model = ModelSpec::rem(7);
    const auto env = sample_environment(model, 331);
    const ExactGibbs engine(model, env, 1.8);
    SamplerConfig cfg{23, 0, 1, std::nullopt};
    const auto report = ball_cover(engine, cfg, 5, 0.5);
    CHECK(report.exact);
    CHECK(report.k == static_cast<int>(report.centers.size()));
    CHECK(report.k >= 1);
    CHECK(report.k <= 5);

    // distinct-state overlap vanishes here, so the union of balls is exactly
    // the center set
    double center_mass = 0.0;
    for (const auto& c : report.centers) center_mass += engine.state_prob(c.spin_bits());
    CHECK(report.covered_fraction == doctest::Approx(center_mass).epsilon(1e-12));

    const auto poly = ModelSpec::polymer(5, WalkKernel::simple_random_walk(2));
    const auto penv = sample_environment(poly, 337);
    const ExactGibbs pengine(poly, penv, 1.1);
    const auto preport = ball_cover(pengine, cfg, 4, 0.4);
    CHECK(preport.exact);
    double mass = 0.0;
    for (const auto& s : brute::all_states(poly)) {
        bool covered = false;
        for (const auto& c : preport.centers)
            if (poly.overlap(c, s) >= 0.4) covered = true;
        if (covered) mass += std::exp(pengine.log_prob(s));
    }
    CHECK(preport.covered_fraction == doctest::Approx(mass).epsilon(1e-9));
}

TEST_CASE("ball cover shrinks as the radius tightens") {
    const auto model = ModelSpec::p_spin(7, MixedXi({{2, 1.0}}));
    const auto env = sample_environment(model, 347);
    const ExactGibbs engine(model, env, 1.3);
    SamplerConfig cfg{29, 1, 1, McmcParams{500, 2}};
    double prev = 1.0 + 1e-12;
    for (const double delta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto report = ball_cover(engine, cfg, 6, delta);
        CHECK(report.covered_fraction <= prev + 1e-12);
        prev = report.covered_fraction;
    }
}

TEST_CASE("ball cover falls back to sampling on big instances") {
    const auto model = ModelSpec::polymer(24, WalkKernel::simple_random_walk(1));
    const auto env = sample_environment(model, 349);
    const ExactGibbs engine(model, env, 1.0);
    SamplerConfig cfg{31, 0, 1, std::nullopt};
    CHECK_THROWS_AS(ball_cover(engine, cfg, 3, 0.4), ValidationError);
    const auto report = ball_cover(engine, cfg, 3, 0.4, 2000);
    CHECK(!report.exact);
    CHECK(report.se > 0.0);
    CHECK(report.covered_fraction >= 0.0);
    CHECK(report.covered_fraction <= 1.0);

    CHECK_THROWS_AS(a_delta_mass(engine, 0.2), BudgetError);
    SamplerConfig est{31, 0, 1000, std::nullopt};
    const auto sampled = a_delta_mass(engine, 0.2, est);
    CHECK(!sampled.exact);
}

TEST_CASE("pair-in-ball threshold") {
    CHECK(pair_in_ball_threshold(1.0) == 3);
    CHECK(pair_in_ball_threshold(0.8) == 5);
    CHECK(pair_in_ball_threshold(0.5) == 9);
    CHECK(pair_in_ball_threshold(0.3) == 24);
    CHECK_THROWS_AS(pair_in_ball_threshold(0.0), ValidationError);
    CHECK_THROWS_AS(pair_in_ball_threshold(1.5), ValidationError);
}

TEST_CASE("enough states in a ball always contain a correlated pair") {
    const auto model = ModelSpec::polymer(8, WalkKernel::simple_random_walk(1));
    const auto env = sample_environment(model, 353);
    const ExactGibbs engine(model, env, 2.0);

    int trials = 0, skipped = 0;
    for (const double delta : {0.5, 0.8}) {
        const auto need = static_cast<std::size_t>(pair_in_ball_threshold(delta));
        for (std::uint32_t rep = 0; rep < 75; ++rep) {
            RngStream rng(61, rep, rng_purpose::sampler);
            const auto sigma0 = engine.sample_path(rng);
            std::vector<StateId> ball;
            for (int draws = 0; draws < 3000 && ball.size() < need; ++draws) {
                auto s = engine.sample_path(rng);
                if (model.overlap(sigma0, s) >= delta) ball.push_back(std::move(s));
            }
            if (ball.size() < need) {
                ++skipped;
                continue;
            }
            ++trials;
            const auto hit = pair_in_ball(model, ball, sigma0, delta);
            REQUIRE(hit.has_value());
            CHECK(model.overlap(ball[hit->first], ball[hit->second]) >= delta * delta / 2.0);
        }
    }
    CHECK(trials >= 100);
    CHECK(skipped <= 50);
}

TEST_CASE("pair-in-ball rejects states outside the ball") {
    const auto model = ModelSpec::rem(4);
    const auto inside = StateId::parse_spins("0000");
    const auto outside = StateId::parse_spins("1111");
    const std::vector<StateId> states{inside, outside};
    CHECK_THROWS_AS(pair_in_ball(model, states, inside, 0.5), ValidationError);
    const std::vector<StateId> ok{inside, inside};
    const auto hit = pair_in_ball(model, ok, inside, 0.5);
    REQUIRE(hit.has_value());
    CHECK(model.overlap(ok[hit->first], ok[hit->second]) >= 0.125);
}

TEST_CASE("orthogonal extraction returns weakly correlated states") {
    const auto model = ModelSpec::rem(10);
    const auto env = sample_environment(model, 359);
    const ExactGibbs engine(model, env, 0.4);
    const auto picks = extract_orthogonal(engine, 0.9, 0.5, 4);
    REQUIRE(picks.size() == 4);
    for (std::size_t i = 0; i < picks.size(); ++i)
        for (std::size_t j = i + 1; j < picks.size(); ++j)
            CHECK(model.overlap(picks[i], picks[j]) < 0.5);

    // conditional overlaps sit near 0.1 for the short 2d walk, so this floor
    // keeps the candidate set fat
    const auto poly = ModelSpec::polymer(8, WalkKernel::simple_random_walk(2));
    const auto penv = sample_environment(poly, 361);
    const ExactGibbs pengine(poly, penv, 0.3);
    const auto ppicks = extract_orthogonal(pengine, 0.3, 0.9, 2);
    REQUIRE(ppicks.size() == 2);
    for (std::size_t i = 0; i < ppicks.size(); ++i) {
        CHECK_NOTHROW(poly.validate_state(ppicks[i]));
        for (std::size_t j = i + 1; j < ppicks.size(); ++j)
            CHECK(poly.overlap(ppicks[i], ppicks[j]) < 0.9);
    }
}

TEST_CASE("orthogonal extraction argument guards") {
    const auto model = ModelSpec::rem(6);
    const auto env = sample_environment(model, 367);
    const ExactGibbs cold(model, env, 0.2);
    CHECK_THROWS_AS(extract_orthogonal(cold, 0.9, 0.5, 0), ValidationError);
    CHECK_THROWS_AS(extract_orthogonal(cold, 0.0, 0.5, 2), ValidationError);
    CHECK_THROWS_AS(extract_orthogonal(cold, 1.5, 0.5, 2), ValidationError);
    CHECK_THROWS_AS(extract_orthogonal(cold, 0.9, 0.0, 2), ValidationError);

    // a strongly localized instance concentrates on high-overlap states, so
    // the candidate set misses the mass floor
    const ExactGibbs hot(model, env, 8.0);
    CHECK_THROWS_AS(extract_orthogonal(hot, 0.9, 0.2, 8), ValidationError);

    const auto big = ModelSpec::polymer(12, WalkKernel::simple_random_walk(2));
    const ExactGibbs bengine(big, sample_environment(big, 373), 0.5);
    CHECK_THROWS_AS(extract_orthogonal(bengine, 0.5, 0.5, 2), BudgetError);
}

TEST_CASE("sampled overlap matrices are positive semidefinite") {
    const auto check_psd = [](const ModelSpec& model, double beta, std::uint64_t seed,
                              std::optional<McmcParams> mcmc) {
        const auto env = sample_environment(model, seed);
        SamplerConfig cfg{seed + 1, 0, 40, mcmc};
        const auto set = sample_states(model, env, beta, cfg);
        const auto m = static_cast<Eigen::Index>(set.states.size());
        Eigen::MatrixXd gram(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                gram(i, j) = model.overlap(set.states[static_cast<std::size_t>(i)],
                                           set.states[static_cast<std::size_t>(j)]);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        CHECK(solver.eigenvalues().minCoeff() >= -1e-8);
    };
    check_psd(ModelSpec::rem(8), 1.2, 379, std::nullopt);
    check_psd(ModelSpec::p_spin(8, MixedXi({{2, 1.0}, {3, 0.7}})), 1.4, 383, McmcParams{500, 2});
    check_psd(ModelSpec::polymer(10, WalkKernel::simple_random_walk(2)), 0.9, 389, std::nullopt);
}
