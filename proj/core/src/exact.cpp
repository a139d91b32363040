#include "gibbslab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <limits>

#include "gibbslab/errors.hpp"
#include "gibbslab/logsumexp.hpp"
#include "spin_local_fields.hpp"

namespace gibbslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ----- spin-model energy tables ---------------------------------------------

// Visits all 2^n states in reflected Gray-code order, updating the energy by
// the flipped spin's local field.
std::vector<double> spin_energies(const ModelSpec& model, const Environment& env) {
    const int n = model.n();
    const auto count = std::uint64_t{1} << n;
    std::vector<double> energies(count);

    if (model.kind() == ModelKind::Rem) {
        const double scale = std::sqrt(static_cast<double>(n));
        for (std::uint64_t idx = 0; idx < count; ++idx) energies[idx] = scale * env.g[idx];
        return energies;
    }

    detail::SpinFieldState fields(model, env);
    energies[0] = fields.energy();
    for (std::uint64_t k = 1; k < count; ++k) {
        fields.apply(std::countr_zero(k));
        energies[k ^ (k >> 1)] = fields.energy();
    }
    return energies;
}

double spin_mean_overlap(const ModelSpec& model, const std::vector<double>& probs) {
    const int n = model.n();
    const auto count = std::uint64_t{1} << n;
    if (model.kind() == ModelKind::Rem) {
        double acc = 0.0;
        for (std::uint64_t idx = 0; idx < count; ++idx) acc += probs[idx] * probs[idx];
        return acc;
    }
    // (1/n) sum over features of <phi_i>^2, via the moment tensors per degree
    double result = 0.0;
    std::vector<double> s(static_cast<std::size_t>(n));
    for (const auto& [p, b] : model.xi().terms()) {
        std::size_t dim = 1;
        for (int k = 0; k < p; ++k) dim *= static_cast<std::size_t>(n);
        std::vector<double> moment(dim, 0.0);
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            const double w = probs[idx];
            if (w == 0.0) continue;
            for (int i = 0; i < n; ++i)
                s[static_cast<std::size_t>(i)] = (idx >> i) & 1u ? 1.0 : -1.0;
            if (p == 2) {
                for (int a = 0; a < n; ++a) {
                    const double wa = w * s[static_cast<std::size_t>(a)];
                    for (int bdx = 0; bdx < n; ++bdx)
                        moment[static_cast<std::size_t>(a + n * bdx)] +=
                            wa * s[static_cast<std::size_t>(bdx)];
                }
            } else {
                for (int a = 0; a < n; ++a) {
                    const double wa = w * s[static_cast<std::size_t>(a)];
                    for (int bdx = 0; bdx < n; ++bdx) {
                        const double wab = wa * s[static_cast<std::size_t>(bdx)];
                        for (int cdx = 0; cdx < n; ++cdx)
                            moment[static_cast<std::size_t>(a + n * (bdx + n * cdx))] +=
                                wab * s[static_cast<std::size_t>(cdx)];
                    }
                }
            }
        }
        double frob2 = 0.0;
        for (double m : moment) frob2 += m * m;
        result += b * b * frob2 / static_cast<double>(dim);
    }
    return result;
}

}  // namespace

// ----- spin data -------------------------------------------------------------

struct ExactGibbs::SpinData {
    std::shared_ptr<const std::vector<double>> energies;
    std::vector<double> probs;
    std::vector<double> cond_overlap;  // empty for the random-energy model (== probs)
    double lse = 0.0;                  // log sum_sigma exp(beta E)
};

// ----- polymer data ----------------------------------------------------------

struct ExactGibbs::PolymerData {
    LatticeBox box;
    int n = 0;
    int dim = 0;
    bool pinned = false;
    std::array<int, 3> endpoint{0, 0, 0};
    std::vector<std::vector<std::int64_t>> sites;  // per slice 0..n, ascending box index
    std::vector<std::vector<int>> slot;            // per slice: box index -> slot or -1
    std::vector<std::vector<double>> rg;           // raw disorder at slice sites (slices 1..n)
    std::vector<std::vector<double>> lf, lb, m1, m2;
    double log_z_unnorm = 0.0;
    double log_ref_norm = 0.0;
    double log_backward_total = 0.0;
    PolymerMarginals marginals;
};

namespace {

std::vector<std::array<int, 3>> slice_sites(const LatticeBox& box, int i, int n, bool pinned,
                                            const std::array<int, 3>& endpoint) {
    std::vector<std::array<int, 3>> out;
    const int dim = box.dim;
    const int r = std::min(i, box.n);
    const auto consider = [&](std::array<int, 3> x) {
        int l1 = std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]);
        if (l1 > i || ((i - l1) & 1)) return;
        if (pinned) {
            int back = std::abs(x[0] - endpoint[0]) + std::abs(x[1] - endpoint[1]) +
                       std::abs(x[2] - endpoint[2]);
            if (back > n - i) return;
        }
        out.push_back(x);
    };
    if (dim == 1) {
        for (int a = -r; a <= r; ++a) consider({a, 0, 0});
    } else if (dim == 2) {
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b) consider({a, b, 0});
    } else {
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b)
                for (int c = -r; c <= r; ++c) consider({a, b, c});
    }
    return out;
}

}  // namespace

// ----- construction ----------------------------------------------------------

ExactGibbs::ExactGibbs(const ModelSpec& model, const Environment& env, double beta,
                       const ExactBudget& budget)
    : model_(model), beta_(beta) {
    if (!std::isfinite(beta) || beta < 0.0)
        throw ValidationError("ExactGibbs: beta must be finite and >= 0");
    model_.validate_environment(env);

    const ExactBudget defaults{};
    const int n = model_.n();

    switch (model_.kind()) {
        case ModelKind::Rem:
            if (n > budget.rem_max_n)
                throw BudgetError("ExactGibbs: rem n = " + std::to_string(n) +
                                  " exceeds the enumeration budget (" +
                                  std::to_string(budget.rem_max_n) + ")");
            break;
        case ModelKind::PSpin:
            if (n > budget.pspin_max_n)
                throw BudgetError("ExactGibbs: p-spin n = " + std::to_string(n) +
                                  " exceeds the enumeration budget (" +
                                  std::to_string(budget.pspin_max_n) +
                                  "); use the Metropolis sampler from the sampling module");
            break;
        case ModelKind::Polymer:
            if (n > budget.polymer_max_n || model_.kernel().dim() > budget.polymer_max_dim)
                throw BudgetError("ExactGibbs: polymer (n = " + std::to_string(n) + ", d = " +
                                  std::to_string(model_.kernel().dim()) +
                                  ") exceeds the transfer-matrix budget (n <= " +
                                  std::to_string(budget.polymer_max_n) + ", d <= " +
                                  std::to_string(budget.polymer_max_dim) + ")");
            break;
    }

    if (model_.kind() != ModelKind::Polymer) {
        const bool beyond_default = (model_.kind() == ModelKind::Rem && n > defaults.rem_max_n) ||
                                    (model_.kind() == ModelKind::PSpin && n > defaults.pspin_max_n);
        if (beyond_default) {
            const double mib = static_cast<double>(std::uint64_t{1} << n) * 8.0 * 3.0 / 1048576.0;
            std::cerr << "ExactGibbs: budget override, allocating about " << mib
                      << " MiB of state tables\n";
        }

        spin_ = std::make_unique<SpinData>();
        spin_->energies =
            std::make_shared<const std::vector<double>>(spin_energies(model_, env));
        const auto count = std::uint64_t{1} << n;
        const auto& energies = *spin_->energies;

        double mx = kNegInf;
        for (std::uint64_t i = 0; i < count; ++i) mx = std::max(mx, beta * energies[i]);
        double sum = 0.0;
        for (std::uint64_t i = 0; i < count; ++i) sum += std::exp(beta * energies[i] - mx);
        spin_->lse = mx + std::log(sum);

        spin_->probs.resize(count);
        for (std::uint64_t i = 0; i < count; ++i)
            spin_->probs[i] = std::exp(beta * energies[i] - spin_->lse);

        double mean = 0.0;
        for (std::uint64_t i = 0; i < count; ++i) mean += spin_->probs[i] * energies[i];
        double var = 0.0;
        for (std::uint64_t i = 0; i < count; ++i) {
            const double d = energies[i] - mean;
            var += spin_->probs[i] * d * d;
        }

        summary_.beta = beta;
        summary_.log_z = spin_->lse - n * std::log(2.0);
        summary_.free_energy = summary_.log_z / n;
        summary_.free_energy_derivative = mean / n;
        summary_.free_energy_second_derivative = std::max(var, 0.0) / n;
        summary_.mean_overlap = spin_mean_overlap(model_, spin_->probs);

        if (model_.kind() == ModelKind::PSpin) {
            // conditional overlap of every state against the whole measure,
            // via the Hamming-distance profile of xi
            std::vector<double> xi_by_d(static_cast<std::size_t>(n) + 1);
            for (int d = 0; d <= n; ++d)
                xi_by_d[static_cast<std::size_t>(d)] =
                    model_.xi()(static_cast<double>(n - 2 * d) / static_cast<double>(n));
            spin_->cond_overlap.assign(count, 0.0);
            for (std::uint64_t a = 0; a < count; ++a) {
                double acc = 0.0;
                for (std::uint64_t b = 0; b < count; ++b)
                    acc += spin_->probs[b] *
                           xi_by_d[static_cast<std::size_t>(std::popcount(a ^ b))];
                spin_->cond_overlap[a] = acc;
            }
        }
        return;
    }

    // ----- polymer -----
    const int dim = model_.kernel().dim();
    poly_ = std::make_unique<PolymerData>();
    auto& P = *poly_;
    P.box = model_.box();
    P.n = n;
    P.dim = dim;
    P.pinned = model_.endpoint().has_value();
    if (P.pinned) P.endpoint = *model_.endpoint();

    P.sites.resize(static_cast<std::size_t>(n) + 1);
    P.slot.resize(static_cast<std::size_t>(n) + 1);
    std::int64_t total_slots = 0;
    for (int i = 0; i <= n; ++i) {
        const auto xs = slice_sites(P.box, i, n, P.pinned, P.endpoint);
        auto& sv = P.sites[static_cast<std::size_t>(i)];
        sv.reserve(xs.size());
        for (const auto& x : xs) sv.push_back(P.box.index(x));
        std::sort(sv.begin(), sv.end());
        auto& lk = P.slot[static_cast<std::size_t>(i)];
        lk.assign(static_cast<std::size_t>(P.box.site_count()), -1);
        for (std::size_t sidx = 0; sidx < sv.size(); ++sidx)
            lk[static_cast<std::size_t>(sv[sidx])] = static_cast<int>(sidx);
        total_slots += static_cast<std::int64_t>(sv.size());
    }

    if (n > defaults.polymer_max_n || dim > defaults.polymer_max_dim)
        std::cerr << "ExactGibbs: budget override, allocating about "
                  << static_cast<double>(total_slots) * 8.0 * 6.0 / 1048576.0
                  << " MiB of transfer tables\n";

    const auto slices = static_cast<std::size_t>(n) + 1;
    P.rg.resize(slices);
    P.lf.resize(slices);
    P.lb.resize(slices);
    P.m1.resize(slices);
    P.m2.resize(slices);

    for (int i = 0; i <= n; ++i) {
        const auto cnt = P.sites[static_cast<std::size_t>(i)].size();
        P.rg[static_cast<std::size_t>(i)].assign(cnt, 0.0);
        if (i >= 1) {
            const auto base =
                static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(P.box.site_count());
            for (std::size_t sidx = 0; sidx < cnt; ++sidx)
                P.rg[static_cast<std::size_t>(i)][sidx] =
                    env.g[base +
                          static_cast<std::size_t>(P.sites[static_cast<std::size_t>(i)][sidx])];
        }
        P.lf[static_cast<std::size_t>(i)].assign(cnt, kNegInf);
        P.lb[static_cast<std::size_t>(i)].assign(cnt, kNegInf);
        P.m1[static_cast<std::size_t>(i)].assign(cnt, 0.0);
        P.m2[static_cast<std::size_t>(i)].assign(cnt, 0.0);
    }

    const auto& kern = model_.kernel();
    const int codes = kern.step_count();

    // forward sweep, carrying conditional energy moments alongside the weights
    P.lf[0][0] = 0.0;
    for (int i = 1; i <= n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const auto& cur = P.sites[si];
        for (std::size_t sidx = 0; sidx < cur.size(); ++sidx) {
            const auto x = P.box.site(cur[sidx]);
            double terms[6];
            int prev_slot[6];
            int cnt = 0;
            double mx = kNegInf;
            for (int c = 0; c < codes; ++c) {
                const auto sv = step_vector(dim, static_cast<std::uint8_t>(c));
                const std::array<int, 3> px{x[0] - sv[0], x[1] - sv[1], x[2] - sv[2]};
                if (!P.box.contains(px)) continue;
                const int ps = P.slot[si - 1][static_cast<std::size_t>(P.box.index(px))];
                if (ps < 0) continue;
                const double t =
                    kern.log_prob(c) + P.lf[si - 1][static_cast<std::size_t>(ps)];
                if (t == kNegInf) continue;
                terms[cnt] = t;
                prev_slot[cnt] = ps;
                mx = std::max(mx, t);
                ++cnt;
            }
            if (cnt == 0) continue;
            double wsum = 0.0;
            for (int c = 0; c < cnt; ++c) wsum += std::exp(terms[c] - mx);
            const double lse = mx + std::log(wsum);
            const double gval = P.rg[si][sidx];
            P.lf[si][sidx] = beta * gval + lse;

            double acc1 = 0.0, acc2 = 0.0;
            for (int c = 0; c < cnt; ++c) {
                const double w = std::exp(terms[c] - lse);
                const double pm1 = P.m1[si - 1][static_cast<std::size_t>(prev_slot[c])];
                const double pm2 = P.m2[si - 1][static_cast<std::size_t>(prev_slot[c])];
                acc1 += w * pm1;
                acc2 += w * (pm2 + 2.0 * gval * pm1);
            }
            P.m1[si][sidx] = gval + acc1;
            P.m2[si][sidx] = acc2 + gval * gval;
        }
    }

    // backward sweep
    auto& lbn = P.lb[static_cast<std::size_t>(n)];
    std::fill(lbn.begin(), lbn.end(), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        const auto si = static_cast<std::size_t>(i);
        const auto& cur = P.sites[si];
        for (std::size_t sidx = 0; sidx < cur.size(); ++sidx) {
            const auto x = P.box.site(cur[sidx]);
            LogSumExpAccumulator acc;
            for (int c = 0; c < codes; ++c) {
                const auto sv = step_vector(dim, static_cast<std::uint8_t>(c));
                const std::array<int, 3> nx{x[0] + sv[0], x[1] + sv[1], x[2] + sv[2]};
                if (!P.box.contains(nx)) continue;
                const int ns = P.slot[si + 1][static_cast<std::size_t>(P.box.index(nx))];
                if (ns < 0) continue;
                const double t = kern.log_prob(c) +
                                 beta * P.rg[si + 1][static_cast<std::size_t>(ns)] +
                                 P.lb[si + 1][static_cast<std::size_t>(ns)];
                if (t != kNegInf) acc.add(t);
            }
            P.lb[si][sidx] = acc.value();
        }
    }
    P.log_backward_total = P.lb[0][0];

    {
        LogSumExpAccumulator acc;
        for (double v : P.lf[static_cast<std::size_t>(n)]) acc.add(v);
        P.log_z_unnorm = acc.value();
    }

    // pinned endpoint: the reference law is the walk conditioned on arrival,
    // so the beta = 0 arrival mass is subtracted from the log-partition
    P.log_ref_norm = 0.0;
    if (P.pinned) {
        std::vector<double> prev{0.0}, cur;
        for (int i = 1; i <= n; ++i) {
            const auto si = static_cast<std::size_t>(i);
            cur.assign(P.sites[si].size(), kNegInf);
            for (std::size_t sidx = 0; sidx < P.sites[si].size(); ++sidx) {
                const auto x = P.box.site(P.sites[si][sidx]);
                LogSumExpAccumulator acc;
                for (int c = 0; c < codes; ++c) {
                    const auto sv = step_vector(dim, static_cast<std::uint8_t>(c));
                    const std::array<int, 3> px{x[0] - sv[0], x[1] - sv[1], x[2] - sv[2]};
                    if (!P.box.contains(px)) continue;
                    const int ps = P.slot[si - 1][static_cast<std::size_t>(P.box.index(px))];
                    if (ps < 0) continue;
                    const double t = kern.log_prob(c) + prev[static_cast<std::size_t>(ps)];
                    if (t != kNegInf) acc.add(t);
                }
                cur[sidx] = acc.value();
            }
            prev = cur;
        }
        P.log_ref_norm = prev[0];  // slice n holds the endpoint only
    }

    // marginals and the summary
    P.marginals.box = P.box;
    P.marginals.slices.resize(static_cast<std::size_t>(n));
    double overlap_acc = 0.0;
    for (int i = 1; i <= n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        auto& out = P.marginals.slices[si - 1];
        out.reserve(P.sites[si].size());
        for (std::size_t sidx = 0; sidx < P.sites[si].size(); ++sidx) {
            const double lfv = P.lf[si][sidx];
            const double lbv = P.lb[si][sidx];
            const double mu =
                (lfv == kNegInf || lbv == kNegInf) ? 0.0 : std::exp(lfv + lbv - P.log_z_unnorm);
            out.emplace_back(P.sites[si][sidx], mu);
            overlap_acc += mu * mu;
        }
    }

    double mean_h = 0.0, mean_h2 = 0.0;
    {
        const auto sn = static_cast<std::size_t>(n);
        for (std::size_t sidx = 0; sidx < P.sites[sn].size(); ++sidx) {
            const double lfv = P.lf[sn][sidx];
            if (lfv == kNegInf) continue;
            const double w = std::exp(lfv - P.log_z_unnorm);
            mean_h += w * P.m1[sn][sidx];
            mean_h2 += w * P.m2[sn][sidx];
        }
    }

    summary_.beta = beta;
    summary_.log_z = P.log_z_unnorm - P.log_ref_norm;
    summary_.free_energy = summary_.log_z / n;
    summary_.free_energy_derivative = mean_h / n;
    summary_.free_energy_second_derivative = std::max(mean_h2 - mean_h * mean_h, 0.0) / n;
    summary_.mean_overlap = overlap_acc / n;
}

ExactGibbs::~ExactGibbs() = default;
ExactGibbs::ExactGibbs(ExactGibbs&&) noexcept = default;
ExactGibbs& ExactGibbs::operator=(ExactGibbs&&) noexcept = default;

// ----- queries ---------------------------------------------------------------

double ExactGibbs::log_partition() const { return summary_.log_z; }
const GibbsSummary& ExactGibbs::summary() const { return summary_; }
double ExactGibbs::mean_overlap() const { return summary_.mean_overlap; }
double ExactGibbs::energy_concentration() const {
    return summary_.free_energy_second_derivative;
}

double ExactGibbs::conditional_overlap(const StateId& state) const {
    model_.validate_state(state);
    if (spin_) return conditional_overlaps()[state.spin_bits()];
    const auto& P = *poly_;
    const auto sites = path_sites(state);
    double acc = 0.0;
    for (int i = 1; i <= P.n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const int sl =
            P.slot[si][static_cast<std::size_t>(P.box.index(sites[si - 1]))];
        if (sl < 0) continue;
        acc += P.marginals.slices[si - 1][static_cast<std::size_t>(sl)].second;
    }
    return acc / P.n;
}

double ExactGibbs::log_prob(const StateId& state) const {
    model_.validate_state(state);
    if (spin_) return beta_ * (*spin_->energies)[state.spin_bits()] - spin_->lse;
    const auto& P = *poly_;
    const auto& kern = model_.kernel();
    const auto sites = path_sites(state);
    double acc = -P.log_z_unnorm;
    for (int i = 1; i <= P.n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        acc += kern.log_prob(state.steps()[si - 1]);
        const int sl = P.slot[si][static_cast<std::size_t>(P.box.index(sites[si - 1]))];
        if (sl < 0) return kNegInf;  // clipped out: reachable only off the support
        acc += beta_ * P.rg[si][static_cast<std::size_t>(sl)];
    }
    return acc;
}

std::uint64_t ExactGibbs::state_count() const {
    if (!spin_) throw ValidationError("ExactGibbs: state tables exist only for spin models");
    return std::uint64_t{1} << model_.n();
}

double ExactGibbs::state_energy(std::uint64_t index) const {
    if (!spin_) throw ValidationError("ExactGibbs: state tables exist only for spin models");
    return (*spin_->energies)[index];
}

double ExactGibbs::state_prob(std::uint64_t index) const {
    if (!spin_) throw ValidationError("ExactGibbs: state tables exist only for spin models");
    return spin_->probs[index];
}

const std::vector<double>& ExactGibbs::state_probs() const {
    if (!spin_) throw ValidationError("ExactGibbs: state tables exist only for spin models");
    return spin_->probs;
}

const std::vector<double>& ExactGibbs::conditional_overlaps() const {
    if (!spin_) throw ValidationError("ExactGibbs: state tables exist only for spin models");
    return model_.kind() == ModelKind::Rem ? spin_->probs : spin_->cond_overlap;
}

const PolymerMarginals& ExactGibbs::marginals() const {
    if (!poly_) throw ValidationError("ExactGibbs: marginals exist only for the polymer");
    return poly_->marginals;
}

double ExactGibbs::log_forward_total() const {
    if (!poly_) throw ValidationError("ExactGibbs: transfer tables exist only for the polymer");
    return poly_->log_z_unnorm;
}

double ExactGibbs::log_backward_total() const {
    if (!poly_) throw ValidationError("ExactGibbs: transfer tables exist only for the polymer");
    return poly_->log_backward_total;
}

StateId ExactGibbs::sample_path(RngStream& rng) const {
    if (!poly_) throw ValidationError("ExactGibbs: path sampling exists only for the polymer");
    const auto& P = *poly_;
    const auto& kern = model_.kernel();
    const int codes = kern.step_count();
    std::array<int, 3> x{0, 0, 0};
    std::vector<std::uint8_t> steps;
    steps.reserve(static_cast<std::size_t>(P.n));
    for (int i = 1; i <= P.n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        double lp[6];
        int code_of[6];
        int cnt = 0;
        double mx = kNegInf;
        for (int c = 0; c < codes; ++c) {
            const auto sv = step_vector(P.dim, static_cast<std::uint8_t>(c));
            const std::array<int, 3> nx{x[0] + sv[0], x[1] + sv[1], x[2] + sv[2]};
            if (!P.box.contains(nx)) continue;
            const int ns = P.slot[si][static_cast<std::size_t>(P.box.index(nx))];
            if (ns < 0) continue;
            const double t = kern.log_prob(c) + beta_ * P.rg[si][static_cast<std::size_t>(ns)] +
                             P.lb[si][static_cast<std::size_t>(ns)];
            if (t == kNegInf) continue;
            lp[cnt] = t;
            code_of[cnt] = c;
            mx = std::max(mx, t);
            ++cnt;
        }
        double total = 0.0;
        for (int c = 0; c < cnt; ++c) total += std::exp(lp[c] - mx);
        const double u = rng.uniform() * total;
        double run = 0.0;
        int chosen = cnt - 1;
        for (int c = 0; c < cnt; ++c) {
            run += std::exp(lp[c] - mx);
            if (u < run) {
                chosen = c;
                break;
            }
        }
        const int code = code_of[chosen];
        const auto sv = step_vector(P.dim, static_cast<std::uint8_t>(code));
        x = {x[0] + sv[0], x[1] + sv[1], x[2] + sv[2]};
        steps.push_back(static_cast<std::uint8_t>(code));
    }
    return StateId::path(P.dim, std::move(steps));
}

double PolymerMarginals::prob(int time, const std::array<int, 3>& site) const {
    if (time < 1 || time > static_cast<int>(slices.size()))
        throw ValidationError("PolymerMarginals: time out of range");
    const auto idx = box.index(site);
    const auto& sl = slices[static_cast<std::size_t>(time - 1)];
    auto it = std::lower_bound(sl.begin(), sl.end(), idx,
                               [](const auto& pr, std::int64_t v) { return pr.first < v; });
    if (it == sl.end() || it->first != idx) return 0.0;
    return it->second;
}

// ----- free functions ----------------------------------------------------------

double log_partition(const ModelSpec& model, const Environment& env, double beta,
                     const ExactBudget& budget) {
    return ExactGibbs(model, env, beta, budget).log_partition();
}

std::vector<GibbsSummary> free_energy_profile(const ModelSpec& model, const Environment& env,
                                              std::span<const double> betas,
                                              const ExactBudget& budget) {
    std::vector<GibbsSummary> out;
    out.reserve(betas.size());
    for (double beta : betas) out.push_back(ExactGibbs(model, env, beta, budget).summary());
    return out;
}

}  // namespace gibbslab
