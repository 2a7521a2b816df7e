#include "volcal/likelihood.hpp"

#include "volcal/errors.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace volcal {

DupireLikelihood::DupireLikelihood(MarketData data, Grid grid, PricerConfig config)
    : data_(std::move(data)), grid_(std::move(grid)), pricer_config_(config) {
    data_.validate();
    // Fail fast when a quote is off-grid.
    for (const OptionQuote& q : data_.quotes) {
        grid_.row_of(q.maturity);
        grid_.col_of(q.strike);
    }
}

double DupireLikelihood::log_density(const Eigen::VectorXd& f, double mu_f,
                                     double sigma_eps) const {
    return log_likelihood(LogVolSurface(grid_, f), mu_f, sigma_eps, data_,
                          pricer_config_);
}

GaussianFieldLikelihood::GaussianFieldLikelihood(Eigen::VectorXd y, double tau)
    : y_(std::move(y)), tau_(tau) {
    if (!(tau_ > 0.0))
        throw validation_error("gaussian field likelihood: tau must be positive");
}

double GaussianFieldLikelihood::log_density(const Eigen::VectorXd& f, double, double) const {
    if (f.size() != y_.size())
        throw validation_error("gaussian field likelihood: size mismatch");
    const double rss = (y_ - f).squaredNorm();
    const double n = static_cast<double>(y_.size());
    return -0.5 * rss / (tau_ * tau_) - n * std::log(tau_) -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

} // namespace volcal
