#include "gibbslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/errors.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Path enumeration is used for exact polymer set masses; beyond this many
// paths callers must fall back to sampling.
constexpr std::uint64_t kPathEnumerationCap = std::uint64_t{1} << 22;

std::uint64_t polymer_path_count(const ModelSpec& model) {
    const auto base = static_cast<std::uint64_t>(2 * model.kernel().dim());
    std::uint64_t count = 1;
    for (int i = 0; i < model.n(); ++i) {
        count *= base;
        if (count > kPathEnumerationCap) return kPathEnumerationCap + 1;
    }
    return count;
}

StateId decode_path(int dim, int n, std::uint64_t code) {
    const auto base = static_cast<std::uint64_t>(2 * dim);
    std::vector<std::uint8_t> steps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        steps[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(code % base);
        code /= base;
    }
    return StateId::path(dim, std::move(steps));
}

std::vector<std::array<int, 3>> code_sites(int dim, int n, std::uint64_t code) {
    const auto base = static_cast<std::uint64_t>(2 * dim);
    std::vector<std::array<int, 3>> sites(static_cast<std::size_t>(n));
    std::array<int, 3> x{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const auto sv = step_vector(dim, static_cast<std::uint8_t>(code % base));
        code /= base;
        x = {x[0] + sv[0], x[1] + sv[1], x[2] + sv[2]};
        sites[static_cast<std::size_t>(i)] = x;
    }
    return sites;
}

double sites_overlap(const std::vector<std::array<int, 3>>& a,
                     const std::vector<std::array<int, 3>>& b) {
    int common = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == b[i]) ++common;
    return static_cast<double>(common) / static_cast<double>(a.size());
}

bool endpoint_matches(const ModelSpec& model, const std::vector<std::array<int, 3>>& sites) {
    if (!model.endpoint()) return true;
    return sites.back() == *model.endpoint();
}

std::vector<StateId> dedup_states(std::vector<StateId> states) {
    std::vector<StateId> out;
    for (auto& s : states)
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
    return out;
}

}  // namespace

MassEstimate a_delta_mass(const ExactGibbs& gibbs, double delta) {
    if (delta < 0.0) throw ValidationError("a_delta_mass: delta must be nonnegative");
    const auto& model = gibbs.model();
    MassEstimate out;

    if (model.kind() != ModelKind::Polymer) {
        const auto& probs = gibbs.state_probs();
        const auto& cond = gibbs.conditional_overlaps();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i)
            if (cond[i] <= delta) acc += probs[i];
        out.value = acc;
        return out;
    }

    const auto count = polymer_path_count(model);
    if (count > kPathEnumerationCap)
        throw BudgetError(
            "a_delta_mass: too many paths to enumerate, use the sampler-config overload");
    const int dim = model.kernel().dim();
    double acc = 0.0;
    for (std::uint64_t c = 0; c < count; ++c) {
        const StateId path = decode_path(dim, model.n(), c);
        if (!endpoint_matches(model, path_sites(path))) continue;
        const double lp = gibbs.log_prob(path);
        if (lp == kNegInf) continue;
        if (gibbs.conditional_overlap(path) <= delta) acc += std::exp(lp);
    }
    out.value = acc;
    return out;
}

MassEstimate a_delta_mass(const ExactGibbs& gibbs, double delta, const SamplerConfig& cfg) {
    if (delta < 0.0) throw ValidationError("a_delta_mass: delta must be nonnegative");
    const auto set = sample_states(gibbs, cfg);
    double hits = 0.0;
    for (const auto& s : set.states)
        if (gibbs.conditional_overlap(s) <= delta) hits += 1.0;
    const auto m = static_cast<double>(set.states.size());
    MassEstimate out;
    out.value = hits / m;
    out.se = std::sqrt(std::max(out.value * (1.0 - out.value) / m, 0.0));
    out.exact = false;
    return out;
}

bool b_delta_indicator(const ExactGibbs& gibbs, double delta) {
    if (delta < 0.0) throw ValidationError("b_delta_indicator: delta must be nonnegative");
    return gibbs.mean_overlap() <= delta;
}

CoverReport ball_cover(const ExactGibbs& gibbs, const SamplerConfig& sampler_cfg, int k,
                       double delta, std::uint64_t eval_samples) {
    if (k < 1) throw ValidationError("ball_cover: k must be at least 1");
    if (delta < 0.0) throw ValidationError("ball_cover: delta must be nonnegative");
    const auto& model = gibbs.model();
    CoverReport out;

    if (model.kind() != ModelKind::Polymer) {
        SamplerConfig cfg = sampler_cfg;
        cfg.num_samples = static_cast<std::uint64_t>(k);
        out.centers = dedup_states(sample_states(gibbs, cfg).states);
        out.k = static_cast<int>(out.centers.size());
        std::vector<std::uint64_t> center_bits;
        center_bits.reserve(out.centers.size());
        for (const auto& s : out.centers) center_bits.push_back(s.spin_bits());
        const auto& probs = gibbs.state_probs();
        double acc = 0.0;
        for (std::uint64_t idx = 0; idx < probs.size(); ++idx)
            for (const auto b : center_bits)
                if (model.spin_overlap_from_bits(b, idx) >= delta) {
                    acc += probs[idx];
                    break;
                }
        out.covered_fraction = acc;
        return out;
    }

    // centers and any evaluation draws share one stream, so they are mutually
    // independent samples
    RngStream rng(sampler_cfg.seed, sampler_cfg.replica_id, rng_purpose::sampler);
    std::vector<StateId> centers;
    centers.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) centers.push_back(gibbs.sample_path(rng));
    out.centers = dedup_states(std::move(centers));
    out.k = static_cast<int>(out.centers.size());
    std::vector<std::vector<std::array<int, 3>>> center_sites;
    center_sites.reserve(out.centers.size());
    for (const auto& s : out.centers) center_sites.push_back(path_sites(s));

    const auto covered = [&](const std::vector<std::array<int, 3>>& sites) {
        for (const auto& cs : center_sites)
            if (sites_overlap(cs, sites) >= delta) return true;
        return false;
    };

    const auto count = polymer_path_count(model);
    if (count <= kPathEnumerationCap) {
        const int dim = model.kernel().dim();
        double acc = 0.0;
        for (std::uint64_t c = 0; c < count; ++c) {
            const StateId path = decode_path(dim, model.n(), c);
            const auto sites = path_sites(path);
            if (!endpoint_matches(model, sites)) continue;
            const double lp = gibbs.log_prob(path);
            if (lp == kNegInf) continue;
            if (covered(sites)) acc += std::exp(lp);
        }
        out.covered_fraction = acc;
        return out;
    }

    if (eval_samples < 1)
        throw ValidationError("ball_cover: instance too large for enumeration, set eval_samples");
    double hits = 0.0;
    for (std::uint64_t j = 0; j < eval_samples; ++j)
        if (covered(path_sites(gibbs.sample_path(rng)))) hits += 1.0;
    const auto m = static_cast<double>(eval_samples);
    out.covered_fraction = hits / m;
    out.se = std::sqrt(std::max(out.covered_fraction * (1.0 - out.covered_fraction) / m, 0.0));
    out.exact = false;
    return out;
}

int pair_in_ball_threshold(double delta) {
    if (delta <= 0.0 || delta > 1.0)
        throw ValidationError("pair_in_ball_threshold: delta must lie in (0, 1]");
    return static_cast<int>(std::ceil(2.0 / (delta * delta))) + 1;
}

std::optional<std::pair<std::size_t, std::size_t>> pair_in_ball(const ModelSpec& model,
                                                                std::span<const StateId> states,
                                                                const StateId& sigma0,
                                                                double delta) {
    model.validate_state(sigma0);
    for (const auto& s : states) {
        model.validate_state(s);
        if (model.overlap(sigma0, s) < delta)
            throw ValidationError("pair_in_ball: a state lies outside the ball around sigma0");
    }
    const double floor = delta * delta / 2.0;
    for (std::size_t j = 0; j < states.size(); ++j)
        for (std::size_t k = j + 1; k < states.size(); ++k)
            if (model.overlap(states[j], states[k]) >= floor) return std::make_pair(j, k);
    return std::nullopt;
}

std::vector<StateId> extract_orthogonal(const ExactGibbs& gibbs, double set_mass_floor,
                                        double overlap_ceiling, int count) {
    if (count < 1) throw ValidationError("extract_orthogonal: count must be at least 1");
    if (set_mass_floor <= 0.0 || set_mass_floor > 1.0)
        throw ValidationError("extract_orthogonal: set_mass_floor must lie in (0, 1]");
    if (overlap_ceiling <= 0.0 || overlap_ceiling > 1.0)
        throw ValidationError("extract_orthogonal: overlap_ceiling must lie in (0, 1]");
    const double delta = set_mass_floor * overlap_ceiling / static_cast<double>(count);
    const auto& model = gibbs.model();
    std::vector<StateId> out;
    out.reserve(static_cast<std::size_t>(count));

    if (model.kind() != ModelKind::Polymer) {
        const auto& probs = gibbs.state_probs();
        const auto& cond = gibbs.conditional_overlaps();
        std::vector<std::uint64_t> cand;
        double mass = 0.0;
        for (std::uint64_t idx = 0; idx < probs.size(); ++idx)
            if (cond[idx] <= delta && probs[idx] > 0.0) {
                cand.push_back(idx);
                mass += probs[idx];
            }
        if (mass < set_mass_floor)
            throw ValidationError("extract_orthogonal: low-overlap set mass is below the floor");
        std::vector<char> alive(cand.size(), 1);
        while (static_cast<int>(out.size()) < count) {
            std::size_t best = cand.size();
            for (std::size_t i = 0; i < cand.size(); ++i)
                if (alive[i] && (best == cand.size() || probs[cand[i]] > probs[cand[best]]))
                    best = i;
            if (best == cand.size())
                throw CheckFailure(
                    "extract_orthogonal: greedy selection exhausted early, which the mass "
                    "argument rules out");
            const std::uint64_t pick = cand[best];
            out.push_back(StateId::spins(pick, model.n()));
            for (std::size_t i = 0; i < cand.size(); ++i)
                if (alive[i] && model.spin_overlap_from_bits(pick, cand[i]) >= overlap_ceiling)
                    alive[i] = 0;
        }
        return out;
    }

    const auto path_count = polymer_path_count(model);
    if (path_count > kPathEnumerationCap)
        throw BudgetError("extract_orthogonal: too many paths to enumerate");
    const int dim = model.kernel().dim();
    std::vector<std::uint64_t> cand;
    std::vector<double> cand_prob;
    double mass = 0.0;
    for (std::uint64_t c = 0; c < path_count; ++c) {
        const StateId path = decode_path(dim, model.n(), c);
        if (!endpoint_matches(model, path_sites(path))) continue;
        const double lp = gibbs.log_prob(path);
        if (lp == kNegInf) continue;
        if (gibbs.conditional_overlap(path) > delta) continue;
        cand.push_back(c);
        cand_prob.push_back(std::exp(lp));
        mass += cand_prob.back();
    }
    if (mass < set_mass_floor)
        throw ValidationError("extract_orthogonal: low-overlap set mass is below the floor");
    std::vector<char> alive(cand.size(), 1);
    while (static_cast<int>(out.size()) < count) {
        std::size_t best = cand.size();
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (alive[i] && (best == cand.size() || cand_prob[i] > cand_prob[best])) best = i;
        if (best == cand.size())
            throw CheckFailure(
                "extract_orthogonal: greedy selection exhausted early, which the mass argument "
                "rules out");
        const auto pick_sites = code_sites(dim, model.n(), cand[best]);
        out.push_back(decode_path(dim, model.n(), cand[best]));
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (alive[i] &&
                sites_overlap(pick_sites, code_sites(dim, model.n(), cand[i])) >= overlap_ceiling)
                alive[i] = 0;
    }
    return out;
}

}  // namespace gibbslab
