#include "gibbslab/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "gibbslab/errors.hpp"
#include "gibbslab/rng.hpp"
#include "gibbslab/stats.hpp"
#include "spin_local_fields.hpp"

namespace gibbslab {

namespace {

void check_config(const ModelKind kind, const SamplerConfig& cfg) {
    if (cfg.num_samples < 1) throw ValidationError("sampler: num_samples must be at least 1");
    if (cfg.mcmc) {
        if (kind != ModelKind::PSpin)
            throw ValidationError(
                "sampler: an exact sampler exists for this model, drop the mcmc block");
        if (cfg.mcmc->sweeps_per_sample < 1)
            throw ValidationError("sampler: sweeps_per_sample must be at least 1");
    } else if (kind == ModelKind::PSpin) {
        throw ValidationError(
            "sampler: the spin mixture model is sampled by Metropolis, set cfg.mcmc");
    }
}

SampleSet sample_rem_table(const ExactGibbs& gibbs, const SamplerConfig& cfg) {
    const auto& probs = gibbs.state_probs();
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    const int n = gibbs.model().n();
    const CounterRng rng(cfg.seed, cfg.replica_id, rng_purpose::sampler);
    SampleSet out;
    out.states.reserve(cfg.num_samples);
    for (std::uint64_t j = 0; j < cfg.num_samples; ++j) {
        const double u = rng.uniform_at(j) * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<std::uint64_t>(
            it == cdf.end() ? cdf.size() - 1
                            : static_cast<std::size_t>(it - cdf.begin()));
        out.states.push_back(StateId::spins(idx, n));
    }
    return out;
}

SampleSet sample_polymer(const ExactGibbs& gibbs, const SamplerConfig& cfg) {
    RngStream rng(cfg.seed, cfg.replica_id, rng_purpose::sampler);
    SampleSet out;
    out.states.reserve(cfg.num_samples);
    for (std::uint64_t j = 0; j < cfg.num_samples; ++j) out.states.push_back(gibbs.sample_path(rng));
    return out;
}

// Minimal interface shared with detail::SpinFieldState: flip_delta / apply / bits.
struct TableFlip {
    const ExactGibbs* gibbs;
    std::uint64_t state = 0;
    double flip_delta(int k) const {
        return gibbs->state_energy(state ^ (std::uint64_t{1} << k)) - gibbs->state_energy(state);
    }
    double apply(int k) {
        const double d = flip_delta(k);
        state ^= std::uint64_t{1} << k;
        return d;
    }
    std::uint64_t bits() const { return state; }
};

template <typename Flip>
SampleSet run_metropolis(int n, double beta, double initial_energy, const SamplerConfig& cfg,
                         Flip& flip) {
    const McmcParams& params = *cfg.mcmc;
    RngStream rng(cfg.seed, cfg.replica_id, rng_purpose::sampler);
    double energy = initial_energy;
    std::uint64_t accepted = 0, proposed = 0;
    const auto sweep = [&] {
        for (int i = 0; i < n; ++i) {
            const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            const double dh = flip.flip_delta(k);
            const double u = rng.uniform();
            ++proposed;
            if (u < std::exp(beta * dh)) {
                flip.apply(k);
                energy += dh;
                ++accepted;
            }
        }
    };
    for (std::uint64_t s = 0; s < params.burn_in_sweeps; ++s) sweep();

    SampleSet out;
    out.exact_law = false;
    out.states.reserve(cfg.num_samples);
    std::vector<double> energies;
    energies.reserve(cfg.num_samples);
    for (std::uint64_t j = 0; j < cfg.num_samples; ++j) {
        for (std::uint64_t s = 0; s < params.sweeps_per_sample; ++s) sweep();
        out.states.push_back(StateId::spins(flip.bits(), n));
        energies.push_back(energy);
    }

    McmcDiagnostics diag;
    diag.burn_in_sweeps = params.burn_in_sweeps;
    diag.sweeps_per_sample = params.sweeps_per_sample;
    diag.acceptance_rate =
        proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    const std::size_t half = energies.size() / 2;
    if (half > 0) {
        const auto first = mean_se({energies.data(), half});
        const auto second = mean_se({energies.data() + half, energies.size() - half});
        diag.half_energy_gap = std::abs(first.mean - second.mean);
        diag.half_energy_gap_se = std::hypot(first.se, second.se);
    }
    out.mcmc = diag;
    return out;
}

}  // namespace

SampleSet sample_states(const ExactGibbs& gibbs, const SamplerConfig& cfg) {
    const ModelKind kind = gibbs.model().kind();
    check_config(kind, cfg);
    switch (kind) {
        case ModelKind::Rem:
            return sample_rem_table(gibbs, cfg);
        case ModelKind::Polymer:
            return sample_polymer(gibbs, cfg);
        case ModelKind::PSpin: {
            TableFlip flip{&gibbs, 0};
            return run_metropolis(gibbs.model().n(), gibbs.beta(), gibbs.state_energy(0), cfg,
                                  flip);
        }
    }
    throw ValidationError("sampler: unknown model kind");
}

SampleSet sample_states(const ModelSpec& model, const Environment& env, double beta,
                        const SamplerConfig& cfg, const ExactBudget& budget) {
    check_config(model.kind(), cfg);
    if (model.kind() == ModelKind::PSpin) {
        detail::SpinFieldState fields(model, env);
        return run_metropolis(model.n(), beta, fields.energy(), cfg, fields);
    }
    const ExactGibbs gibbs(model, env, beta, budget);
    return sample_states(gibbs, cfg);
}

namespace {

// Pairwise overlap totals: grand total plus per-sample row sums, which is all
// the jackknife needs.
struct PairTotals {
    double total = 0.0;
    std::vector<double> row;
};

PairTotals pair_totals(const ModelSpec& model, std::span<const StateId> samples) {
    const std::size_t m = samples.size();
    PairTotals t;
    t.row.assign(m, 0.0);

    if (model.kind() == ModelKind::Rem) {
        std::unordered_map<std::uint64_t, double> counts;
        for (const auto& s : samples) counts[s.spin_bits()] += 1.0;
        for (const auto& [bits, c] : counts) t.total += c * (c - 1.0) / 2.0;
        for (std::size_t i = 0; i < m; ++i) t.row[i] = counts[samples[i].spin_bits()] - 1.0;
        return t;
    }

    if (model.kind() == ModelKind::PSpin) {
        const int n = model.n();
        std::vector<double> xi_by_distance(static_cast<std::size_t>(n) + 1);
        for (int d = 0; d <= n; ++d)
            xi_by_distance[static_cast<std::size_t>(d)] =
                model.xi()(static_cast<double>(n - 2 * d) / static_cast<double>(n));
        std::vector<std::uint64_t> bits(m);
        for (std::size_t i = 0; i < m; ++i) bits[i] = samples[i].spin_bits();
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) {
                const double r = xi_by_distance[static_cast<std::size_t>(
                    std::popcount(bits[j] ^ bits[k]))];
                t.total += r;
                t.row[j] += r;
                t.row[k] += r;
            }
        return t;
    }

    const int n = model.n();
    std::vector<std::vector<std::int64_t>> sites(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto pos = path_sites(samples[i]);
        sites[i].reserve(pos.size());
        for (const auto& x : pos) sites[i].push_back(model.box().index(x));
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
            int common = 0;
            for (int i = 0; i < n; ++i)
                if (sites[j][static_cast<std::size_t>(i)] == sites[k][static_cast<std::size_t>(i)])
                    ++common;
            const double r = static_cast<double>(common) / static_cast<double>(n);
            t.total += r;
            t.row[j] += r;
            t.row[k] += r;
        }
    return t;
}

}  // namespace

OverlapEstimate estimate_mean_overlap(const ModelSpec& model, std::span<const StateId> samples) {
    const std::size_t m = samples.size();
    if (m < 2) throw ValidationError("estimate_mean_overlap: need at least 2 samples");
    for (const auto& s : samples) model.validate_state(s);

    const auto t = pair_totals(model, samples);
    const double md = static_cast<double>(m);
    const double pairs = md * (md - 1.0) / 2.0;

    OverlapEstimate out;
    out.estimate = t.total / pairs;
    if (m < 3) return out;

    const double loo_pairs = (md - 1.0) * (md - 2.0) / 2.0;
    double mean_loo = 0.0;
    std::vector<double> loo(m);
    for (std::size_t i = 0; i < m; ++i) {
        loo[i] = (t.total - t.row[i]) / loo_pairs;
        mean_loo += loo[i];
    }
    mean_loo /= md;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = loo[i] - mean_loo;
        ss += d * d;
    }
    out.standard_error = std::sqrt((md - 1.0) / md * ss);
    return out;
}

}  // namespace gibbslab
