#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/sampling.hpp"

namespace gibbslab {

struct MassEstimate {
    double value = 0.0;
    double se = 0.0;  // zero when exact
    bool exact = true;
};

// Gibbs mass of the low-conditional-overlap set { sigma : R(sigma) <= delta }.
// Spin models and small polymers are evaluated exactly; the overload with a
// sampler config estimates the mass from i.i.d. draws instead.
MassEstimate a_delta_mass(const ExactGibbs& gibbs, double delta);
MassEstimate a_delta_mass(const ExactGibbs& gibbs, double delta, const SamplerConfig& cfg);

// Whether the replica-mean overlap <R_{1,2}> is at most delta.
bool b_delta_indicator(const ExactGibbs& gibbs, double delta);

struct CoverReport {
    int k = 0;  // distinct centers after dedup
    std::vector<StateId> centers;
    double covered_fraction = 0.0;
    double se = 0.0;
    bool exact = true;
};

// Draws k centers from the Gibbs law and reports the mass of the union of
// overlap balls { sigma' : overlap(center, sigma') >= delta }. eval_samples is
// the estimation budget when the instance is too large for exact evaluation.
CoverReport ball_cover(const ExactGibbs& gibbs, const SamplerConfig& sampler_cfg, int k,
                       double delta, std::uint64_t eval_samples = 0);

// Smallest list length at which a high-overlap pair is guaranteed inside any
// overlap ball of radius delta: ceil(2/delta^2) + 1.
int pair_in_ball_threshold(double delta);

// Scans states (all required to lie in the ball around sigma0) for a pair with
// overlap >= delta^2/2 and returns its indices. May be empty below the
// guarantee threshold.
std::optional<std::pair<std::size_t, std::size_t>> pair_in_ball(const ModelSpec& model,
                                                                std::span<const StateId> states,
                                                                const StateId& sigma0,
                                                                double delta);

// Greedy selection of count states, pairwise overlap < overlap_ceiling, from
// the low-conditional-overlap set at delta = set_mass_floor * overlap_ceiling
// / count. The set must carry mass >= set_mass_floor; exhausting it early is
// reported as a CheckFailure since the selection argument rules that out.
std::vector<StateId> extract_orthogonal(const ExactGibbs& gibbs, double set_mass_floor,
                                        double overlap_ceiling, int count);

struct LocalizationReport {
    double beta = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    MassEstimate a_mass;
    bool b_indicator = false;
    std::optional<CoverReport> cover;
};

}  // namespace gibbslab
