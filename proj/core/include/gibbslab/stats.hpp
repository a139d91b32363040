#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gibbslab {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

MeanSe mean_se(std::span<const double> xs);

// Unbiased sample variance plus a standard error for the variance estimate
// itself, from the fourth central moment: Var(s^2) ~ (m4 - s^4 (n-3)/(n-1))/n.
struct VarianceSe {
    double variance = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

VarianceSe variance_se(std::span<const double> xs);

struct Quartiles {
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
};

Quartiles quartiles(std::vector<double> xs);

// Regularized incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a).
double gamma_q(double a, double x);

// Pearson chi-square against expected counts. Cells with expected count below
// min_expected are pooled (smallest first) before the statistic is formed.
struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t merged_cells = 0;
};

ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> expected,
                               double min_expected = 5.0);

// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov p-value.
struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// 64-bit FNV-1a, used to fingerprint configs in output rows.
std::uint64_t fnv1a_hash(std::span<const char> bytes);

}  // namespace gibbslab
