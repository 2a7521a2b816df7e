#pragma once

#include "volcal/dupire_pricer.hpp"
#include "volcal/grid.hpp"
#include "volcal/market_data.hpp"

#include <Eigen/Core>

namespace volcal {

// Log-likelihood of the data given the latent log-vol field and the
// noise/mean block. The sampler only sees this interface, so the pricer
// likelihood can be swapped for analytically tractable ones in tests.
class Likelihood {
public:
    virtual ~Likelihood() = default;
    virtual double log_density(const Eigen::VectorXd& f, double mu_f,
                               double sigma_eps) const = 0;
};

// Quote likelihood through the Dupire pricer (the production path).
class DupireLikelihood : public Likelihood {
public:
    DupireLikelihood(MarketData data, Grid grid, PricerConfig config = {});
    double log_density(const Eigen::VectorXd& f, double mu_f,
                       double sigma_eps) const override;

    const MarketData& data() const { return data_; }
    const Grid& grid() const { return grid_; }
    const PricerConfig& pricer_config() const { return pricer_config_; }

private:
    MarketData data_;
    Grid grid_;
    PricerConfig pricer_config_;
};

// Flat likelihood; chains driven by it sample the prior exactly.
class ConstantLikelihood : public Likelihood {
public:
    explicit ConstantLikelihood(double value = 0.0) : value_(value) {}
    double log_density(const Eigen::VectorXd&, double, double) const override {
        return value_;
    }

private:
    double value_;
};

// Gaussian observation of the field itself, y ~ N(f, tau^2 I). Conjugate to
// the GP prior, so posterior moments have independent references.
class GaussianFieldLikelihood : public Likelihood {
public:
    GaussianFieldLikelihood(Eigen::VectorXd y, double tau);
    double log_density(const Eigen::VectorXd& f, double mu_f,
                       double sigma_eps) const override;

private:
    Eigen::VectorXd y_;
    double tau_;
};

} // namespace volcal
