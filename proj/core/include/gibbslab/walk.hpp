#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace gibbslab {

// Step distribution for the lattice walk underlying the polymer models.
// Support is restricted to the 2d unit steps so the direction-letter state
// encoding stays total; masses may be nonuniform (biased walks are fine).
class WalkKernel {
  public:
    static WalkKernel simple_random_walk(int dim);
    WalkKernel(int dim, std::vector<std::pair<std::array<int, 3>, double>> steps);

    int dim() const { return dim_; }
    int step_count() const { return 2 * dim_; }
    double prob(int code) const { return probs_[static_cast<std::size_t>(code)]; }
    double log_prob(int code) const { return log_probs_[static_cast<std::size_t>(code)]; }
    bool is_uniform() const;

  private:
    WalkKernel() = default;
    int dim_ = 1;
    std::vector<double> probs_;
    std::vector<double> log_probs_;
};

// Site indexing for the box |x|_inf <= n used by polymer feature layouts.
struct LatticeBox {
    int dim = 1;
    int n = 1;

    int side() const { return 2 * n + 1; }
    std::int64_t site_count() const {
        std::int64_t c = 1;
        for (int a = 0; a < dim; ++a) c *= side();
        return c;
    }
    bool contains(const std::array<int, 3>& x) const;
    std::int64_t index(const std::array<int, 3>& x) const;  // row-major, offset by n
    std::array<int, 3> site(std::int64_t idx) const;
};

}  // namespace gibbslab
