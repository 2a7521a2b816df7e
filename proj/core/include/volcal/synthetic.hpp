#pragma once

#include "volcal/dupire_pricer.hpp"
#include "volcal/grid.hpp"
#include "volcal/market_data.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace volcal {

// Node-samples a positive closed-form vol into a log-vol surface (so the
// sampled field carries the whole level, pair it with mu_f = 0). Throws
// validation_error when sigma is non-positive or non-finite at any node.
LogVolSurface surface_from_function(const Grid& grid,
                                    const std::function<double(double, double)>& sigma);

// Prices the truth surface with the Dupire pricer on its own grid, perturbs
// each selected price with iid N(0, noise_sd^2) noise, sets bid/ask =
// mid -/+ noise_sd, and clamps both into the no-arbitrage band
// [max(S - K e^{-rT}, 0), S]. Quote points must be grid nodes. Deterministic
// in the seed.
MarketData generate_synthetic(const LogVolSurface& truth, double mu_f,
                              const std::vector<std::pair<double, double>>& quote_points,
                              double noise_sd, double spot, double rate,
                              std::uint64_t seed, const PricerConfig& config = {});

// Closed-form truth convenience overload; grid_fine is the pricing grid.
MarketData generate_synthetic(const std::function<double(double, double)>& sigma_truth,
                              const Grid& grid_fine,
                              const std::vector<std::pair<double, double>>& quote_points,
                              double noise_sd, double spot, double rate,
                              std::uint64_t seed, const PricerConfig& config = {});

} // namespace volcal
