#include "gibbslab/flows.hpp"

#include <cmath>
#include <numbers>

#include "gibbslab/errors.hpp"
#include "gibbslab/rem_reference.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

namespace {

double generator_value(double beta, const GibbsSummary& s) {
    return beta * beta * (1.0 - s.mean_overlap) - beta * s.free_energy_derivative;
}

// (1/total) integral via trapezoids, visiting every stride-th grid point
double trapezoid_average(std::span<const double> times, std::span<const double> values,
                         std::size_t stride) {
    double acc = 0.0;
    std::size_t prev = 0;
    for (std::size_t j = stride; j < times.size(); j += stride) {
        acc += 0.5 * (values[prev] + values[j]) * (times[j] - times[prev]);
        prev = j;
    }
    const double total = times[prev] - times[0];
    return total > 0.0 ? acc / total : values[0];
}

std::vector<double> uniform_grid(double t, int points) {
    std::vector<double> times(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j)
        times[static_cast<std::size_t>(j)] =
            t * static_cast<double>(j) / static_cast<double>(points - 1);
    return times;
}

}  // namespace

Environment ou_evolve(const Environment& env, double t, std::uint64_t noise_seed) {
    if (t < 0.0) throw ValidationError("ou_evolve: t must be nonnegative");
    Environment out = env;
    if (t == 0.0) return out;
    const double decay = std::exp(-t);
    const double sigma = std::sqrt(1.0 - decay * decay);
    const CounterRng rng(noise_seed, env.replica_id, rng_purpose::ou_noise);
    for (std::size_t i = 0; i < out.g.size(); ++i)
        out.g[i] = decay * env.g[i] + sigma * rng.normal_at(i);
    return out;
}

double ou_generator_integrand(const ModelSpec& model, const Environment& env_t, double beta,
                              const ExactBudget& budget) {
    const ExactGibbs gibbs(model, env_t, beta, budget);
    return generator_value(beta, gibbs.summary());
}

OuTrajectory ou_trajectory(const ModelSpec& model, const Environment& env0, double beta,
                           std::span<const double> times, std::uint64_t noise_seed,
                           const ExactBudget& budget) {
    if (times.empty() || times.front() != 0.0)
        throw ValidationError("ou_trajectory: the time grid must start at 0");
    for (std::size_t j = 1; j < times.size(); ++j)
        if (times[j] <= times[j - 1])
            throw ValidationError("ou_trajectory: times must be strictly increasing");
    model.validate_environment(env0);

    OuTrajectory out;
    out.times.assign(times.begin(), times.end());
    out.envs.reserve(times.size());
    out.envs.push_back(env0);

    const CounterRng rng(noise_seed, env0.replica_id, rng_purpose::ou_noise);
    const auto dim = env0.g.size();
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double dt = times[j] - times[j - 1];
        const double decay = std::exp(-dt);
        const double sigma = std::sqrt(1.0 - decay * decay);
        Environment next = out.envs.back();
        const std::uint64_t base = static_cast<std::uint64_t>(j - 1) * dim;
        for (std::size_t i = 0; i < dim; ++i)
            next.g[i] = decay * out.envs.back().g[i] + sigma * rng.normal_at(base + i);
        out.envs.push_back(std::move(next));
    }

    out.summaries.reserve(times.size());
    out.integrand.reserve(times.size());
    for (const auto& e : out.envs) {
        const ExactGibbs gibbs(model, e, beta, budget);
        out.summaries.push_back(gibbs.summary());
        out.integrand.push_back(generator_value(beta, out.summaries.back()));
    }
    return out;
}

OuVarianceReport ou_variance_experiment(const ModelSpec& model, double beta, double T,
                                        int trajectories, std::uint64_t seed,
                                        const ExactBudget& budget) {
    if (trajectories < 30)
        throw ValidationError("ou_variance_experiment: need at least 30 trajectories");
    if (T <= 0.0) throw ValidationError("ou_variance_experiment: T must be positive");
    const int n = model.n();
    const double t = T / static_cast<double>(n);

    constexpr int kCoarsePoints = 32;
    constexpr int kFinePoints = 2 * kCoarsePoints - 1;
    const auto times = uniform_grid(t, kFinePoints);

    std::vector<double> avg_coarse, avg_fine, grad_terms;
    avg_coarse.reserve(static_cast<std::size_t>(trajectories));
    avg_fine.reserve(static_cast<std::size_t>(trajectories));
    grad_terms.reserve(static_cast<std::size_t>(trajectories));
    for (int r = 0; r < trajectories; ++r) {
        const auto env0 = sample_environment(model, seed, static_cast<std::uint32_t>(r));
        const auto traj = ou_trajectory(model, env0, beta, times, seed, budget);
        avg_coarse.push_back(trapezoid_average(traj.times, traj.integrand, 2));
        avg_fine.push_back(trapezoid_average(traj.times, traj.integrand, 1));
        grad_terms.push_back(beta * beta * traj.summaries.front().mean_overlap /
                             static_cast<double>(n));
    }

    OuVarianceReport rep;
    rep.time_horizon = t;
    const auto lhs = variance_se(avg_coarse);
    rep.lhs = lhs.variance;
    rep.lhs_se = lhs.se;
    const auto grad = mean_se(grad_terms);
    rep.rhs = 2.0 / t * grad.mean;
    rep.rhs_se = 2.0 / t * grad.se;
    const auto stat = mean_se(avg_coarse);
    rep.stationary_mean = stat.mean;
    rep.stationary_mean_se = stat.se;
    rep.refinement_shift = std::abs(variance_se(avg_fine).variance - rep.lhs);
    rep.refinement_ok = rep.refinement_shift <= rep.lhs_se;
    rep.satisfied = rep.lhs <= rep.rhs + 3.0 * std::hypot(rep.lhs_se, rep.rhs_se);
    return rep;
}

TimeAverageReport time_averaged_overlap(const ModelSpec& model, double beta, double T,
                                        int replicas, std::uint64_t seed,
                                        const ExactBudget& budget) {
    if (replicas < 1) throw ValidationError("time_averaged_overlap: need at least 1 replica");
    if (T < 0.0) throw ValidationError("time_averaged_overlap: T must be nonnegative");
    const int n = model.n();
    const double t = T / static_cast<double>(n);
    const auto times = t > 0.0 ? uniform_grid(t, 32) : std::vector<double>{0.0};

    std::vector<double> avgs, slopes;
    avgs.reserve(static_cast<std::size_t>(replicas));
    slopes.reserve(static_cast<std::size_t>(replicas));
    for (int r = 0; r < replicas; ++r) {
        const auto env0 = sample_environment(model, seed, static_cast<std::uint32_t>(r));
        const auto traj = ou_trajectory(model, env0, beta, times, seed, budget);
        std::vector<double> overlaps;
        overlaps.reserve(traj.summaries.size());
        for (const auto& s : traj.summaries) overlaps.push_back(s.mean_overlap);
        avgs.push_back(t > 0.0 ? trapezoid_average(traj.times, overlaps, 1) : overlaps.front());
        slopes.push_back(traj.summaries.front().free_energy_derivative);
    }

    TimeAverageReport rep;
    const auto value = mean_se(avgs);
    rep.value = value.mean;
    rep.se = value.se;
    if (model.kind() == ModelKind::Rem) {
        rep.kappa_target = rem_reference::limit_mean_overlap(beta);
    } else {
        rep.kappa_is_surrogate = true;
        const double slope = mean_se(slopes).mean;
        rep.kappa_target = beta > 0.0 ? std::max(0.0, 1.0 - slope / beta) : 0.0;
    }
    rep.gap = std::abs(rep.value - rep.kappa_target);
    return rep;
}

PerturbationStack sample_perturbation_stack(const ModelSpec& model, std::uint64_t seed,
                                            std::uint32_t replica_id, int k) {
    if (k < 0) throw ValidationError("sample_perturbation_stack: k must be nonnegative");
    PerturbationStack stack;
    stack.n = model.n();
    stack.base = sample_environment(model, seed, replica_id);
    const CounterRng rng(seed, replica_id, rng_purpose::perturbation);
    const auto dim = stack.base.g.size();
    stack.h.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        Environment h;
        h.seed = seed;
        h.replica_id = replica_id;
        h.g.resize(dim);
        const auto base = static_cast<std::uint64_t>(j) * dim;
        for (std::size_t i = 0; i < dim; ++i) h.g[i] = rng.normal_at(base + i);
        stack.h.push_back(std::move(h));
    }
    return stack;
}

Environment perturb(const PerturbationStack& stack) {
    if (stack.n < 1) throw ValidationError("perturb: stack.n must be positive");
    Environment out = stack.base;
    const double scale = 1.0 / std::sqrt(static_cast<double>(stack.n));
    for (const auto& h : stack.h) {
        if (h.g.size() != out.g.size())
            throw ValidationError("perturb: perturbation dimension mismatch");
        for (std::size_t i = 0; i < out.g.size(); ++i) out.g[i] += scale * h.g[i];
    }
    return out;
}

EquivalenceReport temperature_equivalence_test(const ModelSpec& model, double beta, int k,
                                               int replicas, std::uint64_t seed,
                                               const ExactBudget& budget) {
    if (replicas < 100)
        throw ValidationError("temperature_equivalence_test: need at least 100 replicas");
    if (k < 0) throw ValidationError("temperature_equivalence_test: k must be nonnegative");
    const double beta_matched =
        beta * std::sqrt(1.0 + static_cast<double>(k) / static_cast<double>(model.n()));

    const auto m = static_cast<std::size_t>(replicas);
    std::vector<double> f_pert(m), f_fresh(m), r_pert(m), r_fresh(m);
    for (int r = 0; r < replicas; ++r) {
        const auto ri = static_cast<std::size_t>(r);
        const auto stack = sample_perturbation_stack(model, seed, static_cast<std::uint32_t>(r), k);
        const ExactGibbs pert(model, perturb(stack), beta, budget);
        f_pert[ri] = pert.summary().free_energy;
        r_pert[ri] = pert.mean_overlap();
        const auto env_fresh =
            sample_environment(model, seed, static_cast<std::uint32_t>(replicas + r));
        const ExactGibbs fresh(model, env_fresh, beta_matched, budget);
        f_fresh[ri] = fresh.summary().free_energy;
        r_fresh[ri] = fresh.mean_overlap();
    }

    EquivalenceReport rep;
    rep.k = k;
    rep.beta_base = beta;
    rep.beta_matched = beta_matched;
    rep.free_energy = ks_two_sample(f_pert, f_fresh);
    rep.overlap = ks_two_sample(r_pert, r_fresh);
    return rep;
}

double inclusion_factor(const ModelSpec& model, const Environment& env, const Environment& h_env,
                        double beta, const ExactBudget& budget) {
    model.validate_environment(env);
    model.validate_environment(h_env);
    if (beta < 0.0) throw ValidationError("inclusion_factor: beta must be nonnegative");
    const double root_n = std::sqrt(static_cast<double>(model.n()));
    const double base = log_partition(model, env, beta, budget);
    const auto mixed_log_z = [&](double a) {
        Environment mix = env;
        for (std::size_t i = 0; i < mix.g.size(); ++i)
            mix.g[i] = beta * env.g[i] + a / root_n * h_env.g[i];
        return log_partition(model, mix, 1.0, budget);
    };
    const double log_avg_two_beta = mixed_log_z(2.0 * beta) - base;
    const double log_avg_minus_beta = mixed_log_z(-beta) - base;
    return std::exp(0.5 * (std::numbers::ln2 + log_avg_two_beta) + log_avg_minus_beta);
}

double inclusion_tail_constant(double beta) { return 4.0 * std::exp(32.0 * beta * beta); }

}  // namespace gibbslab
