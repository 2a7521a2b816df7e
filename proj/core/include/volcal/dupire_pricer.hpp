#pragma once

#include "volcal/grid.hpp"
#include "volcal/market_data.hpp"

#include <Eigen/Core>

#include <vector>

namespace volcal {

// Crank-Nicolson controls for the forward Dupire solve.
//
// rannacher_steps fully implicit steps damp the payoff kink before the
// scheme switches to trapezoidal weighting. With rannacher_dt = 0 the first
// rannacher_steps sub-steps of the regular schedule run implicit; a positive
// rannacher_dt instead inserts that many implicit micro-steps of the given
// length at t = 0, which confines the first-order damage to a negligible
// slice of the first interval.
struct PricerConfig {
    double max_dt = 0.02;
    int rannacher_steps = 2;
    double rannacher_dt = 0.0;
    bool kink_smoothing = true;
};

// Call prices C(T_i, K_j) on the grid, plus the spot and rate they were
// solved under.
struct PriceSurface {
    Grid grid;
    Eigen::MatrixXd values;
    double spot = 0.0;
    double rate = 0.0;

    double value(std::size_t i, std::size_t j) const {
        return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

// Solves the Dupire forward equation
//   dC/dT = -r K dC/dK + (1/2) K^2 sigma(T, K)^2 d2C/dK2,  C(0, K) = (S - K)+
// with sigma(T_i, K_j) = exp(f_ij + mu_f), interpolated linearly in T between
// maturity rows (clamped outside). Dirichlet boundaries: C = S - K e^{-rT} at
// the low strike edge, C = 0 at the high edge, so the strike span must reach
// [0.3 S, 2 S]. Non-uniform second-order stencils in K; each maturity
// interval is covered by uniform sub-steps no longer than max_dt. A maturity
// row at T = 0 returns the exact payoff.
PriceSurface dupire_price_surface(const LogVolSurface& sigma, double mu_f,
                                  double spot, double rate,
                                  const PricerConfig& config = {});

// Surface values at the quote coordinates, in quote order. Quote coordinates
// must match grid nodes bit-exactly.
std::vector<double> prices_at_quotes(const PriceSurface& surface, const MarketData& data);

struct LikelihoodBreakdown {
    double log_density = 0.0;
    double residual_sum_squares = 0.0;
};

// Gaussian quote likelihood: mid prices observed with iid N(0, sigma_eps^2)
// errors around the model surface,
//   log p = -n/2 log(2 pi sigma_eps^2) - rss / (2 sigma_eps^2).
LikelihoodBreakdown log_likelihood_detail(const LogVolSurface& sigma, double mu_f,
                                          double sigma_eps, const MarketData& data,
                                          const PricerConfig& config = {});

double log_likelihood(const LogVolSurface& sigma, double mu_f, double sigma_eps,
                      const MarketData& data, const PricerConfig& config = {});

} // namespace volcal
