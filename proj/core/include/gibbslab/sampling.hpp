#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gibbslab/environment.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"

namespace gibbslab {

struct McmcParams {
    std::uint64_t burn_in_sweeps = 10000;
    std::uint64_t sweeps_per_sample = 1;
};

struct SamplerConfig {
    std::uint64_t seed = 0;
    std::uint32_t replica_id = 0;
    std::uint64_t num_samples = 1;
    // Metropolis knobs; only accepted for the spin mixture model, which has no
    // exact sampler. One sweep is n single-spin proposals.
    std::optional<McmcParams> mcmc;
};

struct McmcDiagnostics {
    std::uint64_t burn_in_sweeps = 0;
    std::uint64_t sweeps_per_sample = 0;
    double acceptance_rate = 0.0;
    // split-chain stationarity probe: energy means over the two chain halves
    double half_energy_gap = 0.0;
    double half_energy_gap_se = 0.0;
};

struct SampleSet {
    std::vector<StateId> states;
    bool exact_law = true;  // false for Metropolis output
    std::optional<McmcDiagnostics> mcmc;
};

// Table inverse-CDF (REM), sequential backward-table sampling (polymer), or
// Metropolis (spin mixture, needs cfg.mcmc). Identical (seed, cfg) gives the
// identical sequence of states.
SampleSet sample_states(const ExactGibbs& gibbs, const SamplerConfig& cfg);

// Same dispatch without a prebuilt engine. REM and polymer construct one
// internally (budget applies); the spin mixture runs on incremental local
// fields and has no table-size limit.
SampleSet sample_states(const ModelSpec& model, const Environment& env, double beta,
                        const SamplerConfig& cfg, const ExactBudget& budget = {});

struct OverlapEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;  // leave-one-out jackknife; 0 below 3 samples
};

// U-statistic: average overlap over all unordered sample pairs.
OverlapEstimate estimate_mean_overlap(const ModelSpec& model, std::span<const StateId> samples);

}  // namespace gibbslab
