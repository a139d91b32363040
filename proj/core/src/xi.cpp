#include "gibbslab/xi.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "gibbslab/errors.hpp"

namespace gibbslab {

MixedXi::MixedXi(std::vector<std::pair<int, double>> coefficients) {
    if (coefficients.empty()) throw ValidationError("MixedXi: no coefficients");
    std::sort(coefficients.begin(), coefficients.end());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const auto [p, b] = coefficients[i];
        if (p < min_p)
            throw ValidationError("MixedXi: p = " + std::to_string(p) + " below minimum " +
                                  std::to_string(min_p));
        if (p > max_p)
            throw ValidationError("MixedXi: p = " + std::to_string(p) +
                                  " too large for enumeration budget (max " +
                                  std::to_string(max_p) + ")");
        if (i > 0 && coefficients[i - 1].first == p)
            throw ValidationError("MixedXi: duplicate coefficient for p = " + std::to_string(p));
        if (!std::isfinite(b)) throw ValidationError("MixedXi: non-finite coefficient");
        norm2 += b * b;
    }
    if (norm2 <= 0.0) throw ValidationError("MixedXi: coefficients are all zero");

    if (std::abs(norm2 - 1.0) > 1e-12) {
        const double scale = 1.0 / std::sqrt(norm2);
        for (auto& [p, b] : coefficients) b *= scale;
        renormalized_ = true;
        std::cerr << "MixedXi: coefficients renormalized so that xi(1) = 1 (was "
                  << norm2 << ")\n";
    }
    terms_ = std::move(coefficients);

    for (int k = -1000; k <= 1000; ++k) {
        const double q = static_cast<double>(k) / 1000.0;
        if ((*this)(q) < 0.0)
            throw ValidationError("MixedXi: xi(q) < 0 at q = " + std::to_string(q) +
                                  "; signed mixture violates the correlation lower bound");
    }
}

double MixedXi::operator()(double q) const {
    double v = 0.0;
    for (const auto& [p, b] : terms_) v += b * b * std::pow(q, p);
    return v;
}

double MixedXi::coefficient(int p) const {
    for (const auto& [tp, b] : terms_)
        if (tp == p) return b;
    return 0.0;
}

}  // namespace gibbslab
