#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace gibbslab {

// log(sum_i exp(x_i)) with the usual max shift; -inf on empty input.
inline double log_sum_exp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs)
        if (x > m) m = x;
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// Streaming variant: terms arrive one by one, the shift is rescaled on the fly.
class LogSumExpAccumulator {
  public:
    void add(double x) {
        if (x == -std::numeric_limits<double>::infinity()) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
        ++count_;
    }

    double value() const {
        if (count_ == 0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

    std::size_t count() const { return count_; }

  private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    std::size_t count_ = 0;
};

}  // namespace gibbslab
