#include "volcal/dupire_pricer.hpp"
#include "volcal/grid.hpp"

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace {

volcal::Grid pricing_grid(std::size_t n_strikes) {
    std::vector<double> maturities(40);
    for (std::size_t i = 0; i < maturities.size(); ++i)
        maturities[i] = 0.05 * static_cast<double>(i + 1);
    std::vector<double> strikes(n_strikes);
    const double lo = std::log(0.3);
    const double hi = std::log(2.2);
    for (std::size_t j = 0; j < n_strikes; ++j)
        strikes[j] = 100.0 * std::exp(lo + (hi - lo) * static_cast<double>(j) /
                                               static_cast<double>(n_strikes - 1));
    return volcal::Grid(maturities, strikes);
}

// Doubling the strike count at a fixed step schedule should roughly double
// the wall time: the solve is linear in the node count.
void BM_price_surface(benchmark::State& state) {
    const volcal::Grid grid = pricing_grid(static_cast<std::size_t>(state.range(0)));
    const volcal::LogVolSurface sigma(
        grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), std::log(0.2)));
    for (auto _ : state)
        benchmark::DoNotOptimize(volcal::dupire_price_surface(sigma, 0.0, 100.0, 0.02));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_price_surface)->Arg(100)->Arg(200)->Arg(400)->Complexity(benchmark::oN);

} // namespace

BENCHMARK_MAIN();
