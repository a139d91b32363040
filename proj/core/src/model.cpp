#include "gibbslab/model.hpp"

#include <bit>
#include <cmath>

#include "gibbslab/environment.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/rng.hpp"

namespace gibbslab {

namespace {
constexpr std::int64_t kMaxEnvironmentEntries = std::int64_t{1} << 24;

int parity(int v) { return v & 1; }
}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Rem: return "rem";
        case ModelKind::PSpin: return "pspin";
        case ModelKind::Polymer: return "polymer";
    }
    return "?";
}

ModelSpec ModelSpec::rem(int n) {
    if (n < 1) throw ValidationError("rem: n must be >= 1");
    if (n > 20)
        throw BudgetError("rem: n = " + std::to_string(n) +
                          " exceeds the 2^n state table budget (max n = 20)");
    ModelSpec m;
    m.kind_ = ModelKind::Rem;
    m.n_ = n;
    m.feature_count_ = std::int64_t{1} << n;
    return m;
}

ModelSpec ModelSpec::p_spin(int n, MixedXi xi) {
    if (n < 1) throw ValidationError("p_spin: n must be >= 1");
    if (n > 32)
        throw BudgetError("p_spin: n = " + std::to_string(n) +
                          " exceeds the feature table budget (max n = 32); larger sizes are "
                          "out of scope even for the Metropolis sampler");
    ModelSpec m;
    m.kind_ = ModelKind::PSpin;
    m.n_ = n;
    m.xi_ = std::move(xi);
    std::int64_t count = 0;
    for (const auto& [p, b] : m.xi_->terms()) {
        std::int64_t block = 1;
        for (int k = 0; k < p; ++k) block *= n;
        count += block;
    }
    m.feature_count_ = count;
    return m;
}

ModelSpec ModelSpec::polymer(int n, WalkKernel kernel,
                             std::optional<std::array<int, 3>> endpoint) {
    if (n < 1) throw ValidationError("polymer: n must be >= 1");
    if (n > 64)
        throw BudgetError("polymer: n = " + std::to_string(n) +
                          " exceeds the transfer-matrix budget (max n = 64)");
    ModelSpec m;
    m.kind_ = ModelKind::Polymer;
    m.n_ = n;
    const int dim = kernel.dim();
    m.kernel_ = std::move(kernel);
    const LatticeBox box{dim, n};
    m.feature_count_ = static_cast<std::int64_t>(n) * box.site_count();
    if (m.feature_count_ > kMaxEnvironmentEntries)
        throw BudgetError("polymer: environment would need " +
                          std::to_string(m.feature_count_) +
                          " entries; reduce n or the dimension");
    if (endpoint) {
        int l1 = 0;
        for (int a = 0; a < 3; ++a) {
            if (a >= dim && (*endpoint)[a] != 0)
                throw ValidationError("polymer: endpoint uses axes beyond the walk dimension");
            l1 += std::abs((*endpoint)[a]);
        }
        if (l1 > n || parity(l1) != parity(n))
            throw ValidationError("polymer: endpoint is unreachable in n steps");
        m.endpoint_ = endpoint;
    }
    return m;
}

const MixedXi& ModelSpec::xi() const {
    if (!xi_) throw ValidationError("ModelSpec: xi() is defined only for the spin mixture model");
    return *xi_;
}

const WalkKernel& ModelSpec::kernel() const {
    if (!kernel_) throw ValidationError("ModelSpec: kernel() is defined only for the polymer");
    return *kernel_;
}

const std::optional<std::array<int, 3>>& ModelSpec::endpoint() const { return endpoint_; }

LatticeBox ModelSpec::box() const {
    if (kind_ != ModelKind::Polymer)
        throw ValidationError("ModelSpec: box() is defined only for the polymer");
    return LatticeBox{kernel_->dim(), n_};
}

std::int64_t ModelSpec::polymer_feature_index(int time, const std::array<int, 3>& site) const {
    if (kind_ != ModelKind::Polymer)
        throw ValidationError("ModelSpec: feature (time, site) addressing is polymer-only");
    if (time < 1 || time > n_)
        throw ValidationError("ModelSpec: polymer time index must be in [1, n]");
    const auto b = box();
    return static_cast<std::int64_t>(time - 1) * b.site_count() + b.index(site);
}

void ModelSpec::validate_state(const StateId& state) const {
    switch (kind_) {
        case ModelKind::Rem:
        case ModelKind::PSpin:
            if (state.kind() != StateKind::Spins)
                throw ValidationError("state: expected a spin configuration");
            if (state.spin_count() != n_)
                throw ValidationError("state: has " + std::to_string(state.spin_count()) +
                                      " spins, model has n = " + std::to_string(n_));
            return;
        case ModelKind::Polymer: {
            if (state.kind() != StateKind::Path)
                throw ValidationError("state: expected a lattice path");
            if (state.dim() != kernel_->dim())
                throw ValidationError("state: path dimension mismatch");
            if (static_cast<int>(state.steps().size()) != n_)
                throw ValidationError("state: path has " + std::to_string(state.steps().size()) +
                                      " steps, model has n = " + std::to_string(n_));
            if (endpoint_) {
                const auto sites = path_sites(state);
                if (sites.back() != *endpoint_)
                    throw ValidationError("state: path does not end at the pinned endpoint");
            }
            return;
        }
    }
}

void ModelSpec::validate_environment(const Environment& env) const {
    if (static_cast<std::int64_t>(env.g.size()) != feature_count_)
        throw ValidationError("environment: has " + std::to_string(env.g.size()) +
                              " entries, model needs " + std::to_string(feature_count_));
}

StateId ModelSpec::parse_state(const std::string& text) const {
    StateId s = (kind_ == ModelKind::Polymer) ? StateId::parse_path(text, kernel_->dim())
                                              : StateId::parse_spins(text);
    validate_state(s);
    return s;
}

std::vector<double> ModelSpec::feature_vector(const StateId& state) const {
    validate_state(state);
    std::vector<double> phi(static_cast<std::size_t>(feature_count_), 0.0);
    switch (kind_) {
        case ModelKind::Rem:
            phi[static_cast<std::size_t>(state.spin_bits())] = std::sqrt(static_cast<double>(n_));
            break;
        case ModelKind::PSpin: {
            std::size_t offset = 0;
            for (const auto& [p, b] : xi_->terms()) {
                const double c = b * std::pow(static_cast<double>(n_), -0.5 * (p - 1));
                std::int64_t block = 1;
                for (int k = 0; k < p; ++k) block *= n_;
                for (std::int64_t t = 0; t < block; ++t) {
                    std::int64_t rest = t;
                    int prod = 1;
                    for (int k = 0; k < p; ++k) {
                        prod *= state.spin(static_cast<int>(rest % n_));
                        rest /= n_;
                    }
                    phi[offset + static_cast<std::size_t>(t)] = c * prod;
                }
                offset += static_cast<std::size_t>(block);
            }
            break;
        }
        case ModelKind::Polymer: {
            const auto sites = path_sites(state);
            for (int i = 1; i <= n_; ++i)
                phi[static_cast<std::size_t>(
                    polymer_feature_index(i, sites[static_cast<std::size_t>(i - 1)]))] = 1.0;
            break;
        }
    }
    return phi;
}

double ModelSpec::hamiltonian(const Environment& env, const StateId& state) const {
    validate_environment(env);
    validate_state(state);
    switch (kind_) {
        case ModelKind::Rem:
            return std::sqrt(static_cast<double>(n_)) * env.g[state.spin_bits()];
        case ModelKind::PSpin: {
            double h = 0.0;
            std::size_t offset = 0;
            for (const auto& [p, b] : xi_->terms()) {
                const double c = b * std::pow(static_cast<double>(n_), -0.5 * (p - 1));
                std::int64_t block = 1;
                for (int k = 0; k < p; ++k) block *= n_;
                double term = 0.0;
                for (std::int64_t t = 0; t < block; ++t) {
                    std::int64_t rest = t;
                    int prod = 1;
                    for (int k = 0; k < p; ++k) {
                        prod *= state.spin(static_cast<int>(rest % n_));
                        rest /= n_;
                    }
                    term += env.g[offset + static_cast<std::size_t>(t)] * prod;
                }
                h += c * term;
                offset += static_cast<std::size_t>(block);
            }
            return h;
        }
        case ModelKind::Polymer: {
            const auto sites = path_sites(state);
            double h = 0.0;
            for (int i = 1; i <= n_; ++i)
                h += env.g[static_cast<std::size_t>(
                    polymer_feature_index(i, sites[static_cast<std::size_t>(i - 1)]))];
            return h;
        }
    }
    return 0.0;
}

double ModelSpec::spin_overlap_from_bits(std::uint64_t a, std::uint64_t b) const {
    if (kind_ == ModelKind::Rem) return a == b ? 1.0 : 0.0;
    if (kind_ != ModelKind::PSpin)
        throw ValidationError("spin_overlap_from_bits: spin models only");
    const int disagree = std::popcount(a ^ b);
    const double q = static_cast<double>(n_ - 2 * disagree) / static_cast<double>(n_);
    return (*xi_)(q);
}

double ModelSpec::overlap(const StateId& a, const StateId& b) const {
    validate_state(a);
    validate_state(b);
    switch (kind_) {
        case ModelKind::Rem:
        case ModelKind::PSpin:
            return spin_overlap_from_bits(a.spin_bits(), b.spin_bits());
        case ModelKind::Polymer: {
            const auto sa = path_sites(a);
            const auto sb = path_sites(b);
            int agree = 0;
            for (int i = 0; i < n_; ++i)
                if (sa[static_cast<std::size_t>(i)] == sb[static_cast<std::size_t>(i)]) ++agree;
            return static_cast<double>(agree) / static_cast<double>(n_);
        }
    }
    return 0.0;
}

double ModelSpec::metric_rho(const StateId& a, const StateId& b) const {
    return 1.0 - overlap(a, b);
}

}  // namespace gibbslab
