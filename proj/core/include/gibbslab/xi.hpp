#pragma once

#include <utility>
#include <vector>

namespace gibbslab {

// Mixture function xi(q) = sum_p beta_p^2 q^p for the multi-body spin model.
// Coefficients are normalized at construction so that xi(1) = 1, which pins
// the per-state feature norm to exactly n. Signed mixtures are admitted only
// if xi stays nonnegative on [-1, 1] (checked on a fine grid), since the
// built-in models promise correlations bounded below by zero.
class MixedXi {
  public:
    static constexpr int min_p = 2;
    static constexpr int max_p = 3;

    explicit MixedXi(std::vector<std::pair<int, double>> coefficients);

    double operator()(double q) const;
    double coefficient(int p) const;  // beta_p after normalization, 0 if absent
    const std::vector<std::pair<int, double>>& terms() const { return terms_; }
    bool was_renormalized() const { return renormalized_; }

  private:
    std::vector<std::pair<int, double>> terms_;  // sorted by p
    bool renormalized_ = false;
};

}  // namespace gibbslab
