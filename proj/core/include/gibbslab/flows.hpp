#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gibbslab/environment.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/stats.hpp"

namespace gibbslab {

// Exact one-shot Ornstein-Uhlenbeck transition e^{-t} g + sqrt(1-e^{-2t}) xi,
// xi fresh standard normals keyed by (noise_seed, env.replica_id). Composing
// two transitions over [0,s] and [s,t] with independent seeds matches the
// one-shot law over [0,t].
Environment ou_evolve(const Environment& env, double t, std::uint64_t noise_seed);

// Generator of the flow applied to the free energy at the current environment:
// beta^2 (1 - mean_overlap) - beta F'. Mean zero under the stationary law.
double ou_generator_integrand(const ModelSpec& model, const Environment& env_t, double beta,
                              const ExactBudget& budget = {});

struct OuTrajectory {
    std::vector<double> times;            // increasing, starting at 0
    std::vector<Environment> envs;        // one environment per time
    std::vector<GibbsSummary> summaries;  // engine summary per time
    std::vector<double> integrand;        // generator value per time
};

// Evolves env0 along the given time grid with one exact transition per step.
// Noise is addressed per (step, coordinate), so the trajectory is independent
// of scheduling.
OuTrajectory ou_trajectory(const ModelSpec& model, const Environment& env0, double beta,
                           std::span<const double> times, std::uint64_t noise_seed,
                           const ExactBudget& budget = {});

struct OuVarianceReport {
    double time_horizon = 0.0;  // t = T/n
    double lhs = 0.0;           // variance across trajectories of the time-averaged integrand
    double lhs_se = 0.0;
    double rhs = 0.0;  // (2/t) E ||grad f||^2, gradient norm = (beta^2/n) mean_overlap
    double rhs_se = 0.0;
    double stationary_mean = 0.0;  // per-trajectory mean integrand, averaged
    double stationary_mean_se = 0.0;
    double refinement_shift = 0.0;  // |lhs on the doubled grid - lhs|, same noise
    bool refinement_ok = false;     // shift below one lhs standard error
    bool satisfied = false;         // lhs <= rhs + 3 combined SE
};

// Stationary trajectories on a 32-point trapezoid grid over [0, T/n]; the
// quadrature is cross-checked on the 63-point refinement of the same noise.
OuVarianceReport ou_variance_experiment(const ModelSpec& model, double beta, double T,
                                        int trajectories, std::uint64_t seed,
                                        const ExactBudget& budget = {});

struct TimeAverageReport {
    double value = 0.0;  // disorder average of (1/t) integral of mean_overlap
    double se = 0.0;
    double kappa_target = 0.0;        // 1 - p'(beta)/beta against the reference slope
    bool kappa_is_surrogate = false;  // true when p' is replaced by finite-n F'
    double gap = 0.0;                 // |value - kappa_target|
};

// T = 0 degenerates to the single-snapshot disorder average.
TimeAverageReport time_averaged_overlap(const ModelSpec& model, double beta, double T,
                                        int replicas, std::uint64_t seed,
                                        const ExactBudget& budget = {});

struct PerturbationStack {
    Environment base;
    std::vector<Environment> h;  // independent copies of the disorder
    int n = 0;                   // system size setting the 1/sqrt(n) scale
};

// base env from the environment stream, h copies from the perturbation stream
// of the same (seed, replica_id).
PerturbationStack sample_perturbation_stack(const ModelSpec& model, std::uint64_t seed,
                                            std::uint32_t replica_id, int k);

// g + (1/sqrt(n)) sum_j h_j, coordinate-wise.
Environment perturb(const PerturbationStack& stack);

struct EquivalenceReport {
    int k = 0;
    double beta_base = 0.0;
    double beta_matched = 0.0;  // beta sqrt(1 + k/n)
    KsResult free_energy;
    KsResult overlap;
};

// Distributional check that a k-fold environment perturbation matches the
// temperature shift beta -> beta sqrt(1+k/n): two-sample KS over disorder on
// the free energy and on the mean overlap.
EquivalenceReport temperature_equivalence_test(const ModelSpec& model, double beta, int k,
                                               int replicas, std::uint64_t seed,
                                               const ExactBudget& budget = {});

// X = sqrt(2 <e^{2 beta u}>) <e^{-beta u}> with u = (1/sqrt(n)) sum_i h_i phi_i,
// the factor by which one environment perturbation can inflate conditional
// overlaps: R_next(sigma) <= X sqrt(R(sigma)) on low-overlap states.
double inclusion_factor(const ModelSpec& model, const Environment& env, const Environment& h_env,
                        double beta, const ExactBudget& budget = {});

// Tail constant in P(X > delta^{-1/4}) <= C(beta) delta: 4 e^{32 beta^2}.
double inclusion_tail_constant(double beta);

// Aggregate row for flow experiments.
struct FlowReport {
    double kappa_target = 0.0;
    bool kappa_is_surrogate = false;
    double time_avg_overlap = 0.0;
    double variance_lhs = 0.0;
    double variance_rhs = 0.0;
    double inclusion_factor_x = 0.0;
};

}  // namespace gibbslab
