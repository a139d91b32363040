#include "gibbslab/walk.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gibbslab/errors.hpp"
#include "gibbslab/state.hpp"

namespace gibbslab {

WalkKernel WalkKernel::simple_random_walk(int dim) {
    if (dim < 1 || dim > 3) throw ValidationError("WalkKernel: dimension must be in {1,2,3}");
    WalkKernel k;
    k.dim_ = dim;
    k.probs_.assign(static_cast<std::size_t>(2 * dim), 1.0 / (2.0 * dim));
    k.log_probs_.assign(static_cast<std::size_t>(2 * dim), -std::log(2.0 * dim));
    return k;
}

WalkKernel::WalkKernel(int dim, std::vector<std::pair<std::array<int, 3>, double>> steps) {
    if (dim < 1 || dim > 3) throw ValidationError("WalkKernel: dimension must be in {1,2,3}");
    dim_ = dim;
    probs_.assign(static_cast<std::size_t>(2 * dim), 0.0);
    std::vector<bool> seen(static_cast<std::size_t>(2 * dim), false);
    double total = 0.0;
    for (const auto& [v, p] : steps) {
        int code = -1;
        for (int c = 0; c < 2 * dim; ++c)
            if (step_vector(dim, static_cast<std::uint8_t>(c)) == v) code = c;
        if (code < 0)
            throw ValidationError(
                "WalkKernel: step (" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," +
                std::to_string(v[2]) + ") is not a unit step; only nearest-neighbor kernels "
                "are supported");
        if (seen[static_cast<std::size_t>(code)])
            throw ValidationError("WalkKernel: duplicate step in kernel");
        if (!(p >= 0.0) || !std::isfinite(p))
            throw ValidationError("WalkKernel: step masses must be finite and nonnegative");
        seen[static_cast<std::size_t>(code)] = true;
        probs_[static_cast<std::size_t>(code)] = p;
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("WalkKernel: step masses sum to " + std::to_string(total) +
                              ", expected 1");
    log_probs_.resize(probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i)
        log_probs_[i] = probs_[i] > 0.0 ? std::log(probs_[i])
                                        : -std::numeric_limits<double>::infinity();
}

bool WalkKernel::is_uniform() const {
    for (double p : probs_)
        if (std::abs(p - probs_[0]) > 1e-15) return false;
    return true;
}

bool LatticeBox::contains(const std::array<int, 3>& x) const {
    for (int a = 0; a < dim; ++a)
        if (x[a] < -n || x[a] > n) return false;
    for (int a = dim; a < 3; ++a)
        if (x[a] != 0) return false;
    return true;
}

std::int64_t LatticeBox::index(const std::array<int, 3>& x) const {
    if (!contains(x)) throw ValidationError("LatticeBox: site outside |x|_inf <= n");
    std::int64_t idx = 0;
    for (int a = 0; a < dim; ++a) idx = idx * side() + (x[a] + n);
    return idx;
}

std::array<int, 3> LatticeBox::site(std::int64_t idx) const {
    if (idx < 0 || idx >= site_count()) throw ValidationError("LatticeBox: site index out of range");
    std::array<int, 3> x{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        x[a] = static_cast<int>(idx % side()) - n;
        idx /= side();
    }
    return x;
}

}  // namespace gibbslab
