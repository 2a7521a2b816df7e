#pragma once

#include "volcal/dupire_pricer.hpp"
#include "volcal/market_data.hpp"
#include "volcal/rng.hpp"
#include "volcal/sampler.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace volcal {

// Pointwise posterior of the vol surface on the sigma scale (the band
// convention is mean +/- 2 sd); f-scale moments are kept as a secondary
// diagnostic. MAP is the stored sample with maximal log-posterior.
struct SurfaceSummary {
    Grid grid;
    Eigen::VectorXd mean_sigma;
    Eigen::VectorXd sd_sigma;
    Eigen::VectorXd map_sigma;
    Eigen::VectorXd mean_f;
    Eigen::VectorXd sd_f;
    std::size_t map_index = 0;
};

SurfaceSummary summarize(const Chain& chain);

// Per-quote posterior of model price and implied vol. Implied-vol cells that
// cannot be inverted (price outside the no-arbitrage band) are flagged
// missing rather than fatal.
struct QuoteReprice {
    OptionQuote quote;
    double price_mean = 0.0;
    double price_sd = 0.0;
    double iv_mean = 0.0;
    double iv_sd = 0.0;
    std::size_t iv_count = 0;
    double map_price = 0.0;
    double map_iv = 0.0;
    bool map_iv_ok = false;
    double market_iv = 0.0;
    bool market_iv_ok = false;
};

struct RepriceReport {
    std::vector<QuoteReprice> rows;
    // MAP-to-market implied vol error statistics over quotes where both
    // inversions succeed.
    double map_iv_error_mean = 0.0;
    double map_iv_error_sd = 0.0;
    std::size_t n_scored = 0;
};

// Prices `subsample` evenly spaced stored samples plus the MAP sample at the
// quote nodes. Pure function of the chain: no randomness.
RepriceReport reprice(const Chain& chain, const MarketData& data, std::size_t subsample,
                      const PricerConfig& config = {});

// Joint GP-conditional surface draws at unseen points: n_states posterior
// states selected uniformly without replacement, n_draws_per_state joint
// draws each, sigma = exp(draw + mu_f of the state).
struct PredictiveSample {
    std::vector<std::pair<double, double>> points;
    std::vector<Eigen::VectorXd> surfaces;
    std::vector<std::pair<std::size_t, std::size_t>> provenance;
};

PredictiveSample predict(const Chain& chain,
                         const std::vector<std::pair<double, double>>& new_points,
                         std::size_t n_states, std::size_t n_draws_per_state, Rng& rng);

struct PredictiveSummary {
    Eigen::VectorXd mean_sigma;
    Eigen::VectorXd sd_sigma;
};

PredictiveSummary summarize_predictive(const PredictiveSample& sample);

} // namespace volcal
