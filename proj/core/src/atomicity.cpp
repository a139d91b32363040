#include "gibbslab/atomicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/errors.hpp"
#include "gibbslab/logsumexp.hpp"
#include "gibbslab/rng.hpp"
#include "parallel.hpp"

namespace gibbslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_lattice(int dim, int n) {
    if (dim < 1 || dim > 3) throw ValidationError("site disorder: dim must be 1, 2, or 3");
    if (n < 1) throw ValidationError("site disorder: n must be at least 1");
}

void check_env(int dim, int n, std::span<const double> env) {
    check_lattice(dim, n);
    if (static_cast<std::int64_t>(env.size()) != site_env_size(dim, n))
        throw ValidationError("site disorder: environment does not cover every (time, site) pair");
    const LatticeBox box{dim, n};
    const double bytes = static_cast<double>(n + 1) * static_cast<double>(box.site_count()) * 8.0;
    if (bytes > 256.0 * 1024.0 * 1024.0)
        throw BudgetError("site disorder: transfer tables would exceed 256 MiB");
}

std::array<int, 3> advance(const std::array<int, 3>& x, int dim, int code) {
    const auto sv = step_vector(dim, static_cast<std::uint8_t>(code));
    return {x[0] + sv[0], x[1] + sv[1], x[2] + sv[2]};
}

// per-replica disorder streams stay independent across n (and dim) by folding
// both into the stream key
std::uint64_t scan_seed(std::uint64_t seed, int dim, int n) {
    return seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(4 * n + dim));
}

}  // namespace

std::int64_t site_env_index(const LatticeBox& box, int time, const std::array<int, 3>& site) {
    return static_cast<std::int64_t>(time - 1) * box.site_count() + box.index(site);
}

std::int64_t site_env_size(int dim, int n) {
    const LatticeBox box{dim, n};
    return static_cast<std::int64_t>(n) * box.site_count();
}

std::vector<int> path_turns(const StateId& path) {
    if (path.kind() != StateKind::Path) throw ValidationError("path_turns: not a lattice path");
    const auto& steps = path.steps();
    std::vector<int> turns;
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i] != steps[i - 1]) turns.push_back(static_cast<int>(i));
    return turns;
}

StateId flip_at_turn(const StateId& path, int i) {
    if (path.kind() != StateKind::Path) throw ValidationError("flip_at_turn: not a lattice path");
    auto steps = path.steps();
    const auto fi = static_cast<std::size_t>(i);
    if (i < 1 || fi >= steps.size()) throw ValidationError("flip_at_turn: index out of range");
    if (steps[fi] == steps[fi - 1]) throw ValidationError("flip_at_turn: position is not a turn");
    std::swap(steps[fi - 1], steps[fi]);
    return StateId::path(path.dim(), std::move(steps));
}

StateId zigzag_path(int dim, int n) {
    check_lattice(dim, n);
    std::vector<std::uint8_t> steps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) steps[static_cast<std::size_t>(i)] = i % 2 == 0 ? 0 : 1;
    return StateId::path(dim, std::move(steps));
}

PassageTime passage_time(int dim, int n, std::span<const double> env) {
    check_env(dim, n, env);
    const LatticeBox box{dim, n};
    const auto sites = static_cast<std::size_t>(box.site_count());
    const int codes = 2 * dim;

    // best[i][x]: largest disorder sum collectible over steps i+1..n from x
    std::vector<std::vector<double>> best(static_cast<std::size_t>(n) + 1,
                                          std::vector<double>(sites, 0.0));
    for (int i = n - 1; i >= 0; --i) {
        auto& row = best[static_cast<std::size_t>(i)];
        const auto& next = best[static_cast<std::size_t>(i) + 1];
        for (std::size_t s = 0; s < sites; ++s) {
            const auto x = box.site(static_cast<std::int64_t>(s));
            double m = kNegInf;
            for (int c = 0; c < codes; ++c) {
                const auto nx = advance(x, dim, c);
                if (!box.contains(nx)) continue;
                const auto ni = box.index(nx);
                const double v = env[static_cast<std::size_t>(site_env_index(box, i + 1, nx))] +
                                 next[static_cast<std::size_t>(ni)];
                m = std::max(m, v);
            }
            row[s] = m;
        }
    }

    std::array<int, 3> x{0, 0, 0};
    const double value = best[0][static_cast<std::size_t>(box.index(x))];
    std::vector<std::uint8_t> steps;
    steps.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double target = best[static_cast<std::size_t>(i)][static_cast<std::size_t>(box.index(x))];
        for (int c = 0; c < codes; ++c) {
            const auto nx = advance(x, dim, c);
            if (!box.contains(nx)) continue;
            const double v = env[static_cast<std::size_t>(site_env_index(box, i + 1, nx))] +
                             best[static_cast<std::size_t>(i) + 1]
                                 [static_cast<std::size_t>(box.index(nx))];
            if (v == target) {
                steps.push_back(static_cast<std::uint8_t>(c));
                x = nx;
                break;
            }
        }
    }
    return PassageTime{value, StateId::path(dim, std::move(steps))};
}

AtomReport max_atom(int dim, int n, std::span<const double> env, double beta) {
    if (beta < 0.0) throw ValidationError("max_atom: beta must be nonnegative");
    const auto pt = passage_time(dim, n, env);
    const LatticeBox box{dim, n};
    const auto sites = static_cast<std::size_t>(box.site_count());
    const int codes = 2 * dim;

    std::vector<double> prev(sites, kNegInf), cur(sites, kNegInf);
    prev[static_cast<std::size_t>(box.index({0, 0, 0}))] = 0.0;
    for (int i = 1; i <= n; ++i) {
        for (std::size_t s = 0; s < sites; ++s) {
            const auto y = box.site(static_cast<std::int64_t>(s));
            LogSumExpAccumulator acc;
            for (int c = 0; c < codes; ++c) {
                const auto px = advance(y, dim, c);
                if (!box.contains(px)) continue;
                const double lw = prev[static_cast<std::size_t>(box.index(px))];
                if (lw != kNegInf) acc.add(lw);
            }
            const double in = acc.value();
            cur[s] = in == kNegInf
                         ? kNegInf
                         : beta * env[static_cast<std::size_t>(site_env_index(box, i, y))] + in;
        }
        std::swap(prev, cur);
    }
    LogSumExpAccumulator total;
    for (const double lw : prev)
        if (lw != kNegInf) total.add(lw);

    const double atom = std::exp(beta * pt.value - total.value());
    return AtomReport{n,    beta,      pt.value, atom, static_cast<double>(n) * atom,
                      pt.argmax, static_cast<int>(path_turns(pt.argmax).size())};
}

std::vector<boost::multiprecision::cpp_int> count_paths_by_turns(int n, int d) {
    if (n < 1) throw ValidationError("count_paths_by_turns: n must be at least 1");
    if (d < 1) throw ValidationError("count_paths_by_turns: d must be at least 1");
    using boost::multiprecision::cpp_int;
    std::vector<cpp_int> counts(static_cast<std::size_t>(n));
    cpp_int binom = 1;   // C(n-1, j)
    cpp_int powers = 1;  // (2d-1)^j
    for (int j = 0; j < n; ++j) {
        counts[static_cast<std::size_t>(j)] = 2 * d * binom * powers;
        binom = binom * (n - 1 - j) / (j + 1);
        powers *= 2 * d - 1;
    }
    return counts;
}

std::string to_string(EnvKind kind) {
    return kind == EnvKind::Gaussian ? "gaussian" : "bounded_uniform";
}

std::vector<double> sample_site_disorder(EnvKind kind, int dim, int n, std::uint64_t seed,
                                         std::uint32_t replica_id) {
    check_lattice(dim, n);
    const auto size = static_cast<std::size_t>(site_env_size(dim, n));
    const CounterRng rng(scan_seed(seed, dim, n), replica_id, rng_purpose::environment);
    std::vector<double> env(size);
    if (kind == EnvKind::Gaussian) {
        for (std::size_t i = 0; i < size; ++i) env[i] = rng.normal_at(i);
    } else {
        const double half_width = std::sqrt(3.0);
        for (std::size_t i = 0; i < size; ++i)
            env[i] = (2.0 * rng.uniform_at(i) - 1.0) * half_width;
    }
    return env;
}

AtomScanResult atom_decay_scan(int dim, double beta, std::span<const int> n_list, int replicas,
                               EnvKind env_dist, std::uint64_t seed) {
    if (n_list.empty()) throw ValidationError("atom_decay_scan: n grid must be non-empty");
    if (replicas < 1) throw ValidationError("atom_decay_scan: replicas must be at least 1");
    for (const int n : n_list) check_lattice(dim, n);
    if (beta < 0.0) throw ValidationError("atom_decay_scan: beta must be nonnegative");

    AtomScanResult result;
    const auto rep_count = static_cast<std::size_t>(replicas);
    result.rows.resize(n_list.size() * rep_count);
    detail::parallel_for(result.rows.size(), [&](std::size_t j) {
        const std::size_t ni = j / rep_count;
        const auto r = static_cast<std::uint32_t>(j % rep_count);
        const int n = n_list[ni];
        const auto env = sample_site_disorder(env_dist, dim, n, seed, r);
        const auto rep = max_atom(dim, n, env, beta);
        result.rows[j] = {n, r, rep.passage, rep.max_atom, rep.n_times_atom, rep.argmax_turns};
    });

    result.aggregates.reserve(n_list.size());
    double lambda = -std::numeric_limits<double>::infinity();
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        std::vector<double> atoms, scaled;
        double passage_sum = 0.0;
        atoms.reserve(rep_count);
        scaled.reserve(rep_count);
        for (std::size_t r = 0; r < rep_count; ++r) {
            const auto& row = result.rows[ni * rep_count + r];
            atoms.push_back(row.max_atom);
            scaled.push_back(row.n_times_atom);
            passage_sum += row.passage;
        }
        AtomScanAggregate agg;
        agg.n = n_list[ni];
        agg.max_atom_q = quartiles(atoms);
        agg.n_times_atom_q = quartiles(scaled);
        agg.mean_passage_over_n =
            passage_sum / static_cast<double>(rep_count) / static_cast<double>(agg.n);
        lambda = std::max(lambda, agg.mean_passage_over_n);
        result.aggregates.push_back(agg);
    }
    result.lambda_hat = lambda;
    result.env_mean = 0.0;
    return result;
}

std::vector<std::pair<double, double>> flip_gap_pairs(int dim, int n, std::span<const double> env,
                                                      const StateId& path) {
    check_env(dim, n, env);
    if (path.kind() != StateKind::Path || path.dim() != dim ||
        static_cast<int>(path.steps().size()) != n)
        throw ValidationError("flip_gap_pairs: path does not match (dim, n)");
    const LatticeBox box{dim, n};
    const auto sites = path_sites(path);
    std::vector<std::pair<double, double>> pairs;
    for (const int i : path_turns(path)) {
        const auto flipped = flip_at_turn(path, i);
        const auto fs = path_sites(flipped);
        const auto si = static_cast<std::size_t>(i - 1);
        pairs.emplace_back(env[static_cast<std::size_t>(site_env_index(box, i, sites[si]))],
                           env[static_cast<std::size_t>(site_env_index(box, i, fs[si]))]);
    }
    return pairs;
}

std::size_t gap_census(std::span<const std::pair<double, double>> pairs, double gap) {
    std::size_t count = 0;
    for (const auto& [on_path, flipped] : pairs)
        if (on_path > flipped + gap) ++count;
    return count;
}

}  // namespace gibbslab
