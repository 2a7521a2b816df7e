#pragma once

namespace volcal {

// Standard normal CDF.
double norm_cdf(double x);

// European call under Black-Scholes. T = 0 prices the payoff; vol = 0 prices
// the discounted intrinsic value max(S - K e^{-rT}, 0).
double black_scholes_price(double spot, double strike, double maturity,
                           double rate, double vol);

// Black-Scholes vega, dPrice/dVol.
double black_scholes_vega(double spot, double strike, double maturity,
                          double rate, double vol);

// Inverts black_scholes_price in vol to absolute price tolerance 1e-10.
// Bisection bracket plus Newton polish; the price must lie strictly inside
// the no-arbitrage band (max(S - K e^{-rT}, 0), S), otherwise throws
// std::domain_error. T <= 0 also throws std::domain_error.
double implied_volatility(double price, double spot, double strike,
                          double maturity, double rate);

} // namespace volcal
