#pragma once

#include <cmath>

namespace volcal {

// Box constraints for the five hyperparameters. The kernel ones live in
// (0, max]; the log-vol mean is bounded two-sided.
struct HyperBounds {
    double sigma_f_max = 1.0;
    double ell_T_max = 1.0;
    double ell_K_max = 1.0;
    double sigma_eps_max = 0.5;
    double mu_f_lo = std::log(0.01);
    double mu_f_hi = std::log(0.5);

    void validate() const;
};

// Maps an unconstrained coordinate into (lo, hi) through a scaled logistic:
// kappa = lo + (hi - lo) / (1 + e^{-z}).
double constrain(double z, double lo, double hi);

// Inverse map; throws std::domain_error unless kappa lies strictly inside
// (lo, hi).
double unconstrain(double kappa, double lo, double hi);

// Log density of the push-forward of N(0, 1) through constrain:
// log phi(z(kappa)) + log (hi - lo) - log (kappa - lo) - log (hi - kappa).
double log_hyperprior_density(double kappa, double lo, double hi);

} // namespace volcal
