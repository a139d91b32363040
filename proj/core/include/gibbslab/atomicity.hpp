#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gibbslab/state.hpp"
#include "gibbslab/stats.hpp"
#include "gibbslab/walk.hpp"

namespace gibbslab {

// Passage-time machinery for the polymer under the uniform walk: site
// disorder omega(i, x) is a flat vector indexed (time-1) * site_count +
// box.index(x), the same layout the polymer model uses for its features.

std::int64_t site_env_index(const LatticeBox& box, int time, const std::array<int, 3>& site);

// Expected environment size for (dim, n): n * (2n+1)^dim.
std::int64_t site_env_size(int dim, int n);

// Turn positions: 1-based i in [1, n-1] where step i+1 differs from step i.
std::vector<int> path_turns(const StateId& path);

// Swaps the two steps meeting at turn i, moving only the site x_i.
StateId flip_at_turn(const StateId& path, int i);

// Alternating +e1, -e1, ... : every interior position is a turn.
StateId zigzag_path(int dim, int n);

struct PassageTime {
    double value = 0.0;  // max of H over all n-step paths
    StateId argmax;      // lexicographically first maximizer
};

PassageTime passage_time(int dim, int n, std::span<const double> env);

struct AtomReport {
    int n = 0;
    double beta = 0.0;
    double passage = 0.0;        // L_n
    double max_atom = 0.0;       // largest single-path Gibbs mass
    double n_times_atom = 0.0;   // n * max_atom
    StateId argmax;              // path carrying the largest atom
    int argmax_turns = 0;
};

AtomReport max_atom(int dim, int n, std::span<const double> env, double beta);

// Exact path counts by turn number: counts[j] = 2d C(n-1, j) (2d-1)^j.
std::vector<boost::multiprecision::cpp_int> count_paths_by_turns(int n, int d);

enum class EnvKind { Gaussian, BoundedUniform };

std::string to_string(EnvKind kind);

// Mean-zero unit-variance site disorder with finite exponential moments:
// standard normals, or uniforms on [-sqrt(3), sqrt(3)].
std::vector<double> sample_site_disorder(EnvKind kind, int dim, int n, std::uint64_t seed,
                                         std::uint32_t replica_id);

struct AtomScanRow {
    int n = 0;
    std::uint32_t replica = 0;
    double passage = 0.0;
    double max_atom = 0.0;
    double n_times_atom = 0.0;
    int argmax_turns = 0;
};

struct AtomScanAggregate {
    int n = 0;
    Quartiles max_atom_q;
    Quartiles n_times_atom_q;
    double mean_passage_over_n = 0.0;
};

struct AtomScanResult {
    std::vector<AtomScanRow> rows;  // replica-major within each n
    std::vector<AtomScanAggregate> aggregates;
    double lambda_hat = 0.0;  // running max of mean(L_n)/n over the n grid
    double env_mean = 0.0;    // E omega for the chosen family (0 for both)
};

AtomScanResult atom_decay_scan(int dim, double beta, std::span<const int> n_list, int replicas,
                               EnvKind env_dist, std::uint64_t seed);

// Disorder values compared by each turn flip: (omega at x_i, omega at the
// flipped site), one pair per turn of the path.
std::vector<std::pair<double, double>> flip_gap_pairs(int dim, int n, std::span<const double> env,
                                                      const StateId& path);

// How many pairs have first > second + gap.
std::size_t gap_census(std::span<const std::pair<double, double>> pairs, double gap);

}  // namespace gibbslab
