#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace volcal {

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
};

// Monte Carlo call price under dS = r S dt + sigma(t, S) S dW, simulated in
// log space with Euler-Maruyama on n_steps uniform steps over [0, T].
// Independent reference for the PDE pricer; deterministic for a fixed seed
// regardless of thread count (paths are split into fixed sub-stream blocks).
McEstimate mc_price_oracle(const std::function<double(double, double)>& sigma,
                           double spot, double rate, double strike, double maturity,
                           std::size_t n_paths, std::size_t n_steps, std::uint64_t seed);

} // namespace volcal
