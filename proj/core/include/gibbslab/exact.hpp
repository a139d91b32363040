#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gibbslab/environment.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

// Enumeration / transfer-matrix size limits. Overriding a default prints a
// memory estimate to stderr before anything is allocated.
struct ExactBudget {
    int rem_max_n = 20;
    int pspin_max_n = 12;
    int polymer_max_n = 64;
    int polymer_max_dim = 2;
};

struct GibbsSummary {
    double beta = 0.0;
    double log_z = 0.0;        // reference law folded in, so log Z = 0 at beta = 0
    double free_energy = 0.0;  // log_z / n
    double free_energy_derivative = 0.0;         // <H>/n
    double free_energy_second_derivative = 0.0;  // Var(H)/n, nonnegative
    double mean_overlap = 0.0;                   // (1/n) sum_i <phi_i>^2
};

struct PolymerMarginals {
    LatticeBox box;
    // slices[i-1] lists (box site index, probability) for time slice i
    std::vector<std::vector<std::pair<std::int64_t, double>>> slices;
    double prob(int time, const std::array<int, 3>& site) const;
};

// Exact Gibbs engine for one (model, environment, beta) triple.
// Spin models: per-state energy/weight tables filled in Gray-code order with
// cached local fields, all normalization in the log domain. Polymer: forward
// and backward log-partition tables over parity-clipped slices, marginals,
// and conditional energy moments; supports a pinned endpoint.
class ExactGibbs {
  public:
    ExactGibbs(const ModelSpec& model, const Environment& env, double beta,
               const ExactBudget& budget = {});
    ~ExactGibbs();
    ExactGibbs(ExactGibbs&&) noexcept;
    ExactGibbs& operator=(ExactGibbs&&) noexcept;
    ExactGibbs(const ExactGibbs&) = delete;
    ExactGibbs& operator=(const ExactGibbs&) = delete;

    const ModelSpec& model() const { return model_; }
    double beta() const { return beta_; }

    double log_partition() const;
    const GibbsSummary& summary() const;
    double mean_overlap() const;
    double energy_concentration() const;  // Var(H)/n
    double conditional_overlap(const StateId& state) const;
    double log_prob(const StateId& state) const;

    // spin-model tables (throws for the polymer)
    std::uint64_t state_count() const;
    double state_energy(std::uint64_t index) const;
    double state_prob(std::uint64_t index) const;
    const std::vector<double>& state_probs() const;
    const std::vector<double>& conditional_overlaps() const;

    // polymer tables (throws for spin models)
    const PolymerMarginals& marginals() const;
    StateId sample_path(RngStream& rng) const;
    double log_forward_total() const;
    double log_backward_total() const;

  private:
    struct SpinData;
    struct PolymerData;
    ModelSpec model_;
    double beta_ = 0.0;
    GibbsSummary summary_;
    std::unique_ptr<SpinData> spin_;
    std::unique_ptr<PolymerData> poly_;
};

double log_partition(const ModelSpec& model, const Environment& env, double beta,
                     const ExactBudget& budget = {});

// One summary per beta; spin-state energies are shared across the grid.
std::vector<GibbsSummary> free_energy_profile(const ModelSpec& model, const Environment& env,
                                              std::span<const double> betas,
                                              const ExactBudget& budget = {});

}  // namespace gibbslab
