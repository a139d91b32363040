#pragma once

namespace gibbslab::rem_reference {

// Closed-form limit curve for the random-energy model under the scaling used
// here (unit variance per site after the sqrt(n) feature normalization).
// Below the critical temperature the free energy grows linearly in beta.
double beta_critical();                            // sqrt(2 log 2)
double limit_free_energy(double beta);             // beta^2/2 up to critical, then linear
double limit_free_energy_derivative(double beta);  // min(beta, beta_c)
double limit_mean_overlap(double beta);            // 1 - min(beta, beta_c)/beta, 0 at beta = 0

}  // namespace gibbslab::rem_reference
