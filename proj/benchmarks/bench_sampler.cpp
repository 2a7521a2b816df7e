#include "volcal/grid.hpp"
#include "volcal/likelihood.hpp"
#include "volcal/market_data.hpp"
#include "volcal/rng.hpp"
#include "volcal/sampler.hpp"
#include "volcal/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

namespace {

// One shared Markov state on an 8 x 20 grid with a pricer likelihood; the
// three block benchmarks advance it in place, so each measures its block at
// realistic mid-chain states. Expected cost ordering: kappa >= f >= noise.
struct GibbsFixture {
    volcal::Grid grid;
    volcal::HyperBounds bounds;
    volcal::SamplerConfig config;
    std::unique_ptr<volcal::DupireLikelihood> likelihood;
    volcal::ChainState state;
    volcal::Rng rng{18};

    GibbsFixture() : grid(make_grid()) {
        const double spot = 100.0;
        const double rate = 0.02;
        std::vector<std::pair<double, double>> points;
        for (std::size_t i = 0; i < grid.n_maturities(); ++i)
            for (std::size_t j = 0; j < grid.n_strikes(); ++j) {
                const double m = grid.strike(j) / spot;
                if (m >= 0.8 && m <= 1.2) points.emplace_back(grid.maturity(i), grid.strike(j));
            }
        const volcal::MarketData data = volcal::generate_synthetic(
            [](double, double) { return 0.25; }, grid, points, 0.5, spot, rate, 7);
        likelihood = std::make_unique<volcal::DupireLikelihood>(data, grid);
        state = volcal::init_state(grid, bounds, config, *likelihood);
    }

    static volcal::Grid make_grid() {
        std::vector<double> maturities(8), strikes(20);
        for (std::size_t i = 0; i < maturities.size(); ++i)
            maturities[i] = 0.25 + 2.75 * static_cast<double>(i) / 7.0;
        const double lo = std::log(0.3);
        const double hi = std::log(2.2);
        for (std::size_t j = 0; j < strikes.size(); ++j)
            strikes[j] = 100.0 * std::exp(lo + (hi - lo) * static_cast<double>(j) / 19.0);
        return volcal::Grid(maturities, strikes);
    }
};

GibbsFixture& fixture() {
    static GibbsFixture f;
    return f;
}

void BM_update_kappa(benchmark::State& state) {
    GibbsFixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            volcal::update_kappa(f.state, *f.likelihood, f.grid, f.bounds, f.config, f.rng));
}
BENCHMARK(BM_update_kappa);

void BM_update_f(benchmark::State& state) {
    GibbsFixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(volcal::update_f(f.state, *f.likelihood, f.rng));
}
BENCHMARK(BM_update_f);

void BM_update_noise_mean(benchmark::State& state) {
    GibbsFixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            volcal::update_noise_mean(f.state, *f.likelihood, f.bounds, f.rng));
}
BENCHMARK(BM_update_noise_mean);

} // namespace

BENCHMARK_MAIN();
