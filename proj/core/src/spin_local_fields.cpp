#include "spin_local_fields.hpp"

#include <bit>
#include <cmath>

#include "gibbslab/errors.hpp"

namespace gibbslab::detail {

SpinFieldState::SpinFieldState(const ModelSpec& model, const Environment& env) {
    if (model.kind() != ModelKind::PSpin)
        throw ValidationError("SpinFieldState: spin mixture model only");
    model.validate_environment(env);
    n_ = model.n();
    const double nd = static_cast<double>(n_);
    s_.assign(static_cast<std::size_t>(n_), -1.0);

    double c2 = 0.0, c3 = 0.0;
    std::size_t off2 = 0, off3 = 0;
    {
        std::size_t offset = 0;
        for (const auto& [p, b] : model.xi().terms()) {
            const double c = b * std::pow(nd, -0.5 * (p - 1));
            if (p == 2) {
                has2_ = true;
                c2 = c;
                off2 = offset;
            } else {
                has3_ = true;
                c3 = c;
                off3 = offset;
            }
            std::size_t block = 1;
            for (int k = 0; k < p; ++k) block *= static_cast<std::size_t>(n_);
            offset += block;
        }
    }

    if (has2_) {
        a2_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
        for (int k = 0; k < n_; ++k)
            for (int j = 0; j < n_; ++j)
                if (j != k) a2_[i2(k, j)] = c2 * (env.g[off2 + i2(k, j)] + env.g[off2 + i2(j, k)]);
        hfield2_.assign(static_cast<std::size_t>(n_), 0.0);
        for (int k = 0; k < n_; ++k) {
            double h = 0.0;
            for (int j = 0; j < n_; ++j) h += a2_[i2(k, j)] * s_[static_cast<std::size_t>(j)];
            hfield2_[static_cast<std::size_t>(k)] = h;
        }
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                energy_ += c2 * env.g[off2 + i2(a, b)] * s_[static_cast<std::size_t>(a)] *
                           s_[static_cast<std::size_t>(b)];
    }
    if (has3_) {
        b3_.assign(static_cast<std::size_t>(n_) * n_ * n_, 0.0);
        d3_.assign(static_cast<std::size_t>(n_), 0.0);
        for (int k = 0; k < n_; ++k) {
            for (int j = 0; j < n_; ++j)
                for (int l = 0; l < n_; ++l)
                    if (j != k && l != k)
                        b3_[i3(k, j, l)] = c3 * (env.g[off3 + i3(k, j, l)] +
                                                 env.g[off3 + i3(j, k, l)] +
                                                 env.g[off3 + i3(j, l, k)]);
            d3_[static_cast<std::size_t>(k)] = c3 * env.g[off3 + i3(k, k, k)];
        }
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c)
                    energy_ += c3 * env.g[off3 + i3(a, b, c)] * s_[static_cast<std::size_t>(a)] *
                               s_[static_cast<std::size_t>(b)] * s_[static_cast<std::size_t>(c)];
    }
}

double SpinFieldState::flip_delta(int k) const {
    const auto fk = static_cast<std::size_t>(k);
    double delta = 0.0;
    if (has2_) delta += -2.0 * s_[fk] * hfield2_[fk];
    if (has3_) {
        double w = d3_[fk];
        for (int j = 0; j < n_; ++j) {
            double inner = 0.0;
            for (int l = 0; l < n_; ++l) inner += b3_[i3(k, j, l)] * s_[static_cast<std::size_t>(l)];
            w += inner * s_[static_cast<std::size_t>(j)];
        }
        delta += -2.0 * s_[fk] * w;
    }
    return delta;
}

double SpinFieldState::apply(int k) {
    const double delta = flip_delta(k);
    const auto fk = static_cast<std::size_t>(k);
    energy_ += delta;
    s_[fk] = -s_[fk];
    bits_ ^= std::uint64_t{1} << k;
    if (has2_)
        for (int j = 0; j < n_; ++j)
            hfield2_[static_cast<std::size_t>(j)] += 2.0 * s_[fk] * a2_[i2(j, k)];
    return delta;
}

void SpinFieldState::set_bits(std::uint64_t bits) {
    std::uint64_t diff = bits_ ^ bits;
    while (diff != 0) {
        const int k = std::countr_zero(diff);
        apply(k);
        diff &= diff - 1;
    }
}

}  // namespace gibbslab::detail
