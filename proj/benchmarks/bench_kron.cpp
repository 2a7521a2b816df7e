#include "volcal/gp_prior.hpp"
#include "volcal/grid.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

namespace {

volcal::Grid lattice(std::size_t rows, std::size_t cols) {
    std::vector<double> maturities(rows), strikes(cols);
    for (std::size_t i = 0; i < rows; ++i)
        maturities[i] = 0.25 + 2.75 * static_cast<double>(i) / static_cast<double>(rows - 1);
    for (std::size_t j = 0; j < cols; ++j)
        strikes[j] = 50.0 + 150.0 * static_cast<double>(j) / static_cast<double>(cols - 1);
    return volcal::Grid(maturities, strikes);
}

// Factorized covariance build: each doubling of both grid directions
// quadruples the node count, and the cost should stay well under the cube of
// that growth (the factor work is O(I^3 + J^3), not O(N^3)).
void BM_kron_cholesky(benchmark::State& state) {
    const volcal::Grid grid = lattice(static_cast<std::size_t>(state.range(0)),
                                      static_cast<std::size_t>(state.range(1)));
    const volcal::GPHyperparams kappa{0.4, 0.6, 0.4};
    for (auto _ : state) {
        const volcal::KroneckerCholesky chol(grid, kappa);
        benchmark::DoNotOptimize(chol.chol_T()(0, 0));
    }
    state.SetComplexityN(static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_kron_cholesky)->Args({8, 20})->Args({16, 40})->Args({32, 80})->Complexity();

} // namespace

BENCHMARK_MAIN();
