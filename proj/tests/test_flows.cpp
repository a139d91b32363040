#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gibbslab/environment.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/flows.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/rem_reference.hpp"
#include "support/brute.hpp"

using namespace gibbslab;

TEST_CASE("zero-time transition is the identity") {
    const auto model = ModelSpec::rem(8);
    const auto env = sample_environment(model, 401, 3);
    const auto same = ou_evolve(env, 0.0, 7);
    CHECK(same.g == env.g);
    CHECK(same.seed == env.seed);
    CHECK(same.replica_id == env.replica_id);
    CHECK_THROWS_AS(ou_evolve(env, -0.1, 7), ValidationError);

    const auto moved = ou_evolve(env, 0.5, 7);
    CHECK(moved.g != env.g);
    CHECK(ou_evolve(env, 0.5, 7).g == moved.g);
    Environment other = env;
    other.replica_id = 4;
    CHECK(ou_evolve(other, 0.5, 7).g != moved.g);
}

TEST_CASE("transitions preserve the stationary law and compose") {
    const auto model = ModelSpec::rem(14);
    const auto env = sample_environment(model, 403);
    const double s = 0.4, u = 0.35;
    const auto mid = ou_evolve(env, s, 11);
    const auto end = ou_evolve(mid, u, 13);

    const auto m = static_cast<double>(env.g.size());
    const double decay = std::exp(-(s + u));
    double mean = 0.0, var = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < env.g.size(); ++i) {
        mean += end.g[i];
        var += end.g[i] * end.g[i];
        cross += end.g[i] * env.g[i];
    }
    mean /= m;
    var = var / m - mean * mean;
    cross /= m;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(m));
    CHECK(std::abs(var - 1.0) < 8.0 / std::sqrt(m));
    CHECK(std::abs(cross - decay) < 8.0 / std::sqrt(m));

    // the innovation against the exact two-step decay must be unit normal and
    // independent of the start
    const double sigma = std::sqrt(1.0 - decay * decay);
    double rmean = 0.0, rvar = 0.0, rcross = 0.0;
    for (std::size_t i = 0; i < env.g.size(); ++i) {
        const double r = (end.g[i] - decay * env.g[i]) / sigma;
        rmean += r;
        rvar += r * r;
        rcross += r * env.g[i];
    }
    rmean /= m;
    rvar = rvar / m - rmean * rmean;
    rcross /= m;
    CHECK(std::abs(rmean) < 5.0 / std::sqrt(m));
    CHECK(std::abs(rvar - 1.0) < 8.0 / std::sqrt(m));
    CHECK(std::abs(rcross) < 5.0 / std::sqrt(m));
}

TEST_CASE("generator integrand equals the finite-difference generator") {
    const auto model = ModelSpec::rem(4);
    const auto env = sample_environment(model, 407);
    const double beta = 1.1;
    const auto f = [&](const Environment& e) {
        return log_partition(model, e, beta) / model.n();
    };

    const double h = 1e-3;
    const double f0 = f(env);
    double laplacian = 0.0, drift = 0.0;
    for (std::size_t i = 0; i < env.g.size(); ++i) {
        Environment up = env, down = env;
        up.g[i] += h;
        down.g[i] -= h;
        const double fu = f(up), fd = f(down);
        laplacian += (fu - 2.0 * f0 + fd) / (h * h);
        drift += env.g[i] * (fu - fd) / (2.0 * h);
    }
    const double fd_generator = laplacian - drift;
    CHECK(ou_generator_integrand(model, env, beta) ==
          doctest::Approx(fd_generator).epsilon(1e-4).scale(1.0));
}

TEST_CASE("generator has mean zero over the disorder") {
    const auto model = ModelSpec::rem(8);
    const double beta = 1.3;
    std::vector<double> values;
    for (std::uint32_t r = 0; r < 400; ++r)
        values.push_back(ou_generator_integrand(model, sample_environment(model, 409, r), beta));
    const auto m = mean_se(values);
    CHECK(std::abs(m.mean) <= 4.0 * m.se);
}

TEST_CASE("trajectories are grid-consistent and deterministic") {
    const auto model = ModelSpec::p_spin(5, MixedXi({{2, 1.0}}));
    const auto env0 = sample_environment(model, 419, 2);
    const std::vector<double> times{0.0, 0.1, 0.25, 0.5, 1.0};
    const double beta = 0.9;
    const auto traj = ou_trajectory(model, env0, beta, times, 21);
    REQUIRE(traj.envs.size() == times.size());
    REQUIRE(traj.summaries.size() == times.size());
    REQUIRE(traj.integrand.size() == times.size());
    CHECK(traj.envs.front().g == env0.g);
    for (std::size_t j = 0; j < times.size(); ++j) {
        const ExactGibbs fresh(model, traj.envs[j], beta);
        CHECK(traj.summaries[j].log_z == doctest::Approx(fresh.log_partition()).epsilon(1e-12));
        CHECK(traj.integrand[j] ==
              doctest::Approx(beta * beta * (1.0 - traj.summaries[j].mean_overlap) -
                              beta * traj.summaries[j].free_energy_derivative)
                  .epsilon(1e-12));
    }
    const auto again = ou_trajectory(model, env0, beta, times, 21);
    CHECK(again.envs.back().g == traj.envs.back().g);

    CHECK_THROWS_AS(ou_trajectory(model, env0, beta, std::vector<double>{0.1, 0.2}, 1),
                    ValidationError);
    CHECK_THROWS_AS(ou_trajectory(model, env0, beta, std::vector<double>{0.0, 0.2, 0.2}, 1),
                    ValidationError);
    CHECK_THROWS_AS(ou_trajectory(model, env0, beta, std::vector<double>{}, 1), ValidationError);
}

TEST_CASE("time-averaged generator variance obeys the dissipation bound") {
    const auto model = ModelSpec::rem(6);
    const auto rep = ou_variance_experiment(model, 1.2, 3.0, 120, 431);
    CHECK(rep.time_horizon == doctest::Approx(0.5));
    CHECK(rep.satisfied);
    CHECK(rep.refinement_ok);
    CHECK(rep.rhs > 0.0);
    CHECK(std::abs(rep.stationary_mean) <= 4.0 * rep.stationary_mean_se);

    CHECK_THROWS_AS(ou_variance_experiment(model, 1.2, 3.0, 10, 431), ValidationError);
    CHECK_THROWS_AS(ou_variance_experiment(model, 1.2, 0.0, 120, 431), ValidationError);
}

TEST_CASE("time-averaged overlap reporting") {
    const auto rem = ModelSpec::rem(8);
    const auto high = time_averaged_overlap(rem, 2.5, 0.0, 60, 433);
    CHECK(!high.kappa_is_surrogate);
    CHECK(high.kappa_target == doctest::Approx(rem_reference::limit_mean_overlap(2.5)));
    CHECK(high.value >= 0.0);
    CHECK(high.value <= 1.0);
    CHECK(high.gap == doctest::Approx(std::abs(high.value - high.kappa_target)));

    // snapshot average must match a direct disorder average of the engine value
    double direct = 0.0;
    for (std::uint32_t r = 0; r < 60; ++r) {
        const ExactGibbs engine(rem, sample_environment(rem, 433, r), 2.5);
        direct += engine.mean_overlap();
    }
    direct /= 60.0;
    CHECK(high.value == doctest::Approx(direct).epsilon(1e-12));

    const auto low = time_averaged_overlap(rem, 0.6, 2.0, 40, 437);
    CHECK(low.kappa_target == doctest::Approx(0.0));

    const auto pspin = time_averaged_overlap(ModelSpec::p_spin(6, MixedXi({{2, 1.0}})),
                                             1.0, 1.0, 40, 439);
    CHECK(pspin.kappa_is_surrogate);

    CHECK_THROWS_AS(time_averaged_overlap(rem, 1.0, 1.0, 0, 1), ValidationError);
    CHECK_THROWS_AS(time_averaged_overlap(rem, 1.0, -1.0, 10, 1), ValidationError);
}

TEST_CASE("perturbation stacks add independent copies at the root-n scale") {
    const auto model = ModelSpec::rem(9);
    const auto stack = sample_perturbation_stack(model, 443, 5, 3);
    CHECK(stack.n == 9);
    REQUIRE(stack.h.size() == 3);
    const auto base = sample_environment(model, 443, 5);
    CHECK(stack.base.g == base.g);
    CHECK(stack.h[0].g != stack.h[1].g);
    CHECK(stack.h[0].g != base.g);

    const auto shifted = perturb(stack);
    const double scale = 1.0 / 3.0;
    for (std::size_t i = 0; i < base.g.size(); ++i) {
        const double expect =
            base.g[i] + scale * (stack.h[0].g[i] + stack.h[1].g[i] + stack.h[2].g[i]);
        CHECK(shifted.g[i] == doctest::Approx(expect).epsilon(1e-15));
    }

    const auto empty = sample_perturbation_stack(model, 443, 5, 0);
    CHECK(perturb(empty).g == base.g);
    CHECK_THROWS_AS(sample_perturbation_stack(model, 1, 0, -1), ValidationError);

    auto broken = stack;
    broken.h[1].g.pop_back();
    CHECK_THROWS_AS(perturb(broken), ValidationError);
}

TEST_CASE("k perturbations match the shifted temperature in law") {
    const auto rem = ModelSpec::rem(10);
    const auto rep = temperature_equivalence_test(rem, 1.2, 5, 150, 449);
    CHECK(rep.k == 5);
    CHECK(rep.beta_base == doctest::Approx(1.2));
    CHECK(rep.beta_matched == doctest::Approx(1.2 * std::sqrt(1.5)));
    CHECK(rep.free_energy.p_value > 0.01);
    CHECK(rep.overlap.p_value > 0.01);

    const auto poly = ModelSpec::polymer(8, WalkKernel::simple_random_walk(1));
    const auto prep = temperature_equivalence_test(poly, 0.9, 4, 120, 451);
    CHECK(prep.beta_matched == doctest::Approx(0.9 * std::sqrt(1.5)));
    CHECK(prep.free_energy.p_value > 0.01);
    CHECK(prep.overlap.p_value > 0.01);

    CHECK_THROWS_AS(temperature_equivalence_test(rem, 1.0, 1, 50, 1), ValidationError);
    CHECK_THROWS_AS(temperature_equivalence_test(rem, 1.0, -1, 150, 1), ValidationError);
}

TEST_CASE("inclusion factor matches its Gibbs-average definition") {
    const auto check = [](const ModelSpec& model, std::uint64_t seed, double beta) {
        const auto stack = sample_perturbation_stack(model, seed, 0, 1);
        const auto& env = stack.base;
        const auto& h = stack.h[0];
        const ExactGibbs engine(model, env, beta);
        const auto ref = brute::reference_gibbs(model, env, beta);

        const double root_n = std::sqrt(static_cast<double>(model.n()));
        double e_two = 0.0, e_minus = 0.0;
        for (std::size_t i = 0; i < ref.states.size(); ++i) {
            const auto phi = model.feature_vector(ref.states[i]);
            double u = 0.0;
            for (std::size_t j = 0; j < phi.size(); ++j) u += h.g[j] * phi[j];
            u /= root_n;
            e_two += ref.probs[i] * std::exp(2.0 * beta * u);
            e_minus += ref.probs[i] * std::exp(-beta * u);
        }
        const double expect = std::sqrt(2.0 * e_two) * e_minus;
        CHECK(inclusion_factor(model, env, h, beta) ==
              doctest::Approx(expect).epsilon(1e-9));
        CHECK(engine.log_partition() == doctest::Approx(ref.log_z).epsilon(1e-9));
    };
    check(ModelSpec::rem(6), 457, 1.0);
    check(ModelSpec::polymer(5, WalkKernel::simple_random_walk(2)), 461, 0.8);

    CHECK(inclusion_tail_constant(0.0) == doctest::Approx(4.0));
    CHECK(inclusion_tail_constant(0.5) == doctest::Approx(4.0 * std::exp(8.0)));
}

TEST_CASE("one perturbation inflates conditional overlaps by at most X root") {
    const auto check = [](const ModelSpec& model, std::uint64_t seed, double beta) {
        for (std::uint32_t rep = 0; rep < 40; ++rep) {
            const auto stack = sample_perturbation_stack(model, seed, rep, 1);
            const auto shifted = perturb(stack);
            const ExactGibbs before(model, stack.base, beta);
            const ExactGibbs after(model, shifted, beta);
            const double x = inclusion_factor(model, stack.base, stack.h[0], beta);
            for (const auto& s : brute::all_states(model)) {
                const double r0 = before.conditional_overlap(s);
                const double r1 = after.conditional_overlap(s);
                CHECK(r1 <= x * std::sqrt(r0) + 1e-12);
            }
        }
    };
    check(ModelSpec::rem(6), 463, 1.0);
    check(ModelSpec::polymer(5, WalkKernel::simple_random_walk(1)), 467, 1.2);
}
