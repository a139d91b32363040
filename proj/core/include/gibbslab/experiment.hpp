#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gibbslab/atomicity.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/sampling.hpp"

namespace gibbslab {

enum class ExperimentKind {
    IdentityCheck,
    Moments,
    LocalizationScan,
    BallCover,
    OuVariance,
    TemperatureEquivalence,
    AtomDecay,
    TurnCensus,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

// Model block as it appears in a config file. n may be 0 for scans that sweep
// it from a grid (atom_decay, turn_census take only the dimension).
struct ModelConfig {
    std::string kind = "rem";  // rem | p_spin | polymer
    int n = 0;
    int dim = 1;
    std::vector<std::pair<int, double>> couplings;  // (p, beta_p), p_spin only
    std::optional<std::array<int, 3>> endpoint;     // polymer pinning

    ModelSpec build() const { return build_with_n(n); }
    ModelSpec build_with_n(int system_size) const;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::IdentityCheck;
    ModelConfig model;
    std::vector<double> beta_grid;
    std::vector<double> delta_grid;  // localization_scan, ball_cover
    std::vector<double> time_grid;   // ou_variance horizons T
    std::vector<int> n_grid;         // atom_decay, turn_census
    int replicas = 1;
    std::uint64_t seed = 0;
    std::string output_dir = "results";
    std::optional<ExactBudget> budget;
    int cover_k = 8;
    std::uint64_t cover_eval_samples = 4096;
    std::optional<McmcParams> mcmc;  // forwarded to samplers for the spin mixture
    int perturbation_k = 1;          // temperature_equivalence
    EnvKind env_dist = EnvKind::Gaussian;

    void validate() const;          // throws ValidationError naming the field
    std::string canonical_text() const;  // sorted-key serialization, hashed below
    std::uint64_t hash() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct FlagOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> replicas;
    std::optional<std::string> output_dir;
};

// Applies flag-over-config precedence, logging each replaced field to stderr.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const FlagOverrides& flags);

struct Assertion {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;  // the value observed is compared against
};

struct ExperimentOutcome {
    bool pass = false;
    std::vector<Assertion> assertions;
    std::string csv_path;
    std::string summary_path;
    std::uint64_t config_hash = 0;
};

// Runs the experiment, writing rows.csv (config_hash column first, numbers at
// 17 significant digits, rows in replica-major deterministic order) and
// summary.json (estimates, assertion flags, provenance) under output_dir.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// Concatenates the rows.csv files found under results_dir (they must share a
// schema) into one plot-ready long-format file; returns the path written.
std::string emit_summary(const std::string& results_dir);

}  // namespace gibbslab
