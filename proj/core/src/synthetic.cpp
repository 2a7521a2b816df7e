#include "volcal/synthetic.hpp"

#include "volcal/errors.hpp"
#include "volcal/rng.hpp"

#include <algorithm>
#include <cmath>

namespace volcal {

LogVolSurface surface_from_function(const Grid& grid,
                                    const std::function<double(double, double)>& sigma) {
    Eigen::VectorXd values(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.n_maturities(); ++i)
        for (std::size_t j = 0; j < grid.n_strikes(); ++j) {
            const double v = sigma(grid.maturity(i), grid.strike(j));
            if (!(v > 0.0) || !std::isfinite(v))
                throw validation_error("surface_from_function: sigma must be finite and positive");
            values[static_cast<Eigen::Index>(grid.index(i, j))] = std::log(v);
        }
    return LogVolSurface(grid, values);
}

MarketData generate_synthetic(const LogVolSurface& truth, double mu_f,
                              const std::vector<std::pair<double, double>>& quote_points,
                              double noise_sd, double spot, double rate,
                              std::uint64_t seed, const PricerConfig& config) {
    if (!(noise_sd >= 0.0))
        throw validation_error("generate_synthetic: noise_sd must be non-negative");
    if (quote_points.empty())
        throw validation_error("generate_synthetic: no quote points");

    const PriceSurface surface = dupire_price_surface(truth, mu_f, spot, rate, config);
    Rng rng(seed);

    MarketData data;
    data.spot = spot;
    data.rate = rate;
    data.quotes.reserve(quote_points.size());
    for (const auto& [maturity, strike] : quote_points) {
        const std::size_t i = truth.grid.row_of(maturity);
        const std::size_t j = truth.grid.col_of(strike);
        const double noisy = surface.value(i, j) + noise_sd * rng.normal();
        const double lower = std::max(spot - strike * std::exp(-rate * maturity), 0.0);
        OptionQuote quote;
        quote.maturity = maturity;
        quote.strike = strike;
        quote.bid = std::clamp(noisy - noise_sd, lower, spot);
        quote.ask = std::clamp(noisy + noise_sd, lower, spot);
        data.quotes.push_back(quote);
    }
    data.validate();
    return data;
}

MarketData generate_synthetic(const std::function<double(double, double)>& sigma_truth,
                              const Grid& grid_fine,
                              const std::vector<std::pair<double, double>>& quote_points,
                              double noise_sd, double spot, double rate,
                              std::uint64_t seed, const PricerConfig& config) {
    return generate_synthetic(surface_from_function(grid_fine, sigma_truth), 0.0,
                              quote_points, noise_sd, spot, rate, seed, config);
}

} // namespace volcal
