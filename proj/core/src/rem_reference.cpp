#include "gibbslab/rem_reference.hpp"

#include <cmath>

#include "gibbslab/errors.hpp"

namespace gibbslab::rem_reference {

double beta_critical() { return std::sqrt(2.0 * std::log(2.0)); }

double limit_free_energy(double beta) {
    if (beta < 0.0) throw ValidationError("rem_reference: beta must be >= 0");
    const double bc = beta_critical();
    if (beta <= bc) return 0.5 * beta * beta;
    return 0.5 * bc * bc + (beta - bc) * bc;
}

double limit_free_energy_derivative(double beta) {
    if (beta < 0.0) throw ValidationError("rem_reference: beta must be >= 0");
    return std::min(beta, beta_critical());
}

double limit_mean_overlap(double beta) {
    if (beta < 0.0) throw ValidationError("rem_reference: beta must be >= 0");
    if (beta == 0.0) return 0.0;
    return 1.0 - limit_free_energy_derivative(beta) / beta;
}

}  // namespace gibbslab::rem_reference
