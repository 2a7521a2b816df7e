#include "volcal/hyperprior.hpp"

#include "volcal/errors.hpp"

#include <numbers>
#include <stdexcept>

namespace volcal {

void HyperBounds::validate() const {
    if (!(sigma_f_max > 0.0) || !(ell_T_max > 0.0) || !(ell_K_max > 0.0) ||
        !(sigma_eps_max > 0.0))
        throw validation_error("hyper bounds: upper bounds must be positive");
    if (!(mu_f_hi > mu_f_lo))
        throw validation_error("hyper bounds: mu_f interval is empty");
}

double constrain(double z, double lo, double hi) {
    if (!(hi > lo)) throw validation_error("constrain: interval is empty");
    // Tail-stable logistic.
    const double logistic =
        z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return lo + (hi - lo) * logistic;
}

double unconstrain(double kappa, double lo, double hi) {
    if (!(hi > lo)) throw validation_error("unconstrain: interval is empty");
    if (!(kappa > lo) || !(kappa < hi))
        throw std::domain_error("unconstrain: value outside the open interval");
    return std::log(kappa - lo) - std::log(hi - kappa);
}

double log_hyperprior_density(double kappa, double lo, double hi) {
    const double z = unconstrain(kappa, lo, hi);
    return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(hi - lo) -
           std::log(kappa - lo) - std::log(hi - kappa);
}

} // namespace volcal
