#include "volcal/black_scholes.hpp"

#include "volcal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace volcal {

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double black_scholes_price(double spot, double strike, double maturity,
                           double rate, double vol) {
    if (!(spot > 0.0) || !(strike >= 0.0) || maturity < 0.0 || vol < 0.0)
        throw validation_error("black_scholes_price: invalid input");
    if (strike == 0.0) return spot;
    if (maturity == 0.0) return std::max(spot - strike, 0.0);
    const double discounted_strike = strike * std::exp(-rate * maturity);
    if (vol == 0.0) return std::max(spot - discounted_strike, 0.0);
    const double total_sd = vol * std::sqrt(maturity);
    const double d1 = std::log(spot / discounted_strike) / total_sd + 0.5 * total_sd;
    const double d2 = d1 - total_sd;
    return spot * norm_cdf(d1) - discounted_strike * norm_cdf(d2);
}

double black_scholes_vega(double spot, double strike, double maturity,
                          double rate, double vol) {
    if (maturity <= 0.0 || vol <= 0.0 || strike <= 0.0) return 0.0;
    const double total_sd = vol * std::sqrt(maturity);
    const double d1 = (std::log(spot / strike) + rate * maturity) / total_sd + 0.5 * total_sd;
    const double pdf = std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi);
    return spot * pdf * std::sqrt(maturity);
}

double implied_volatility(double price, double spot, double strike,
                          double maturity, double rate) {
    if (!(maturity > 0.0))
        throw std::domain_error("implied_volatility: maturity must be positive");
    if (!(spot > 0.0) || !(strike > 0.0))
        throw validation_error("implied_volatility: spot and strike must be positive");
    const double intrinsic = std::max(spot - strike * std::exp(-rate * maturity), 0.0);
    if (!(price > intrinsic) || !(price < spot))
        throw std::domain_error("implied_volatility: price outside no-arbitrage band");

    constexpr double price_tol = 1e-10;
    const auto value = [&](double vol) {
        return black_scholes_price(spot, strike, maturity, rate, vol) - price;
    };

    double lo = 0.0;
    double hi = 1.0;
    while (value(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw numerical_error("implied_volatility: bracket expansion failed");
    }

    double vol = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double diff = value(vol);
        if (std::abs(diff) <= 0.25 * price_tol) break;
        if (diff > 0.0) hi = vol; else lo = vol;
        vol = 0.5 * (lo + hi);
        if (hi - lo < 1e-16 * std::max(1.0, vol)) break;
    }

    // Newton polish; bisection already put vol near the root, so a few steps
    // reach the price tolerance whenever vega is healthy.
    for (int iter = 0; iter < 8; ++iter) {
        const double diff = value(vol);
        if (std::abs(diff) <= 0.25 * price_tol) break;
        const double vega = black_scholes_vega(spot, strike, maturity, rate, vol);
        if (!(vega > 1e-12)) break;
        const double next = vol - diff / vega;
        if (!(next > lo) || !(next < hi)) break;
        vol = next;
    }

    if (std::abs(value(vol)) > price_tol)
        throw numerical_error("implied_volatility: failed to reach price tolerance");
    return vol;
}

} // namespace volcal
