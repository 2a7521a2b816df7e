#include "volcal/posterior.hpp"

#include "volcal/black_scholes.hpp"
#include "volcal/errors.hpp"
#include "volcal/gp_prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volcal {

namespace {

std::size_t map_sample_index(const Chain& chain) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < chain.samples.size(); ++s)
        if (chain.samples[s].log_posterior > chain.samples[best].log_posterior) best = s;
    return best;
}

// Mean and ddof-1 sd accumulated via Welford.
class MomentAccumulator {
public:
    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    std::size_t count() const { return count_; }
    double mean() const { return mean_; }
    double sd() const {
        return count_ > 1 ? std::sqrt(m2_ / static_cast<double>(count_ - 1)) : 0.0;
    }

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

} // namespace

SurfaceSummary summarize(const Chain& chain) {
    if (chain.samples.empty()) throw validation_error("summarize: empty chain");
    const std::size_t n_nodes = chain.grid.size();

    SurfaceSummary out;
    out.grid = chain.grid;
    out.map_index = map_sample_index(chain);

    std::vector<MomentAccumulator> sigma_acc(n_nodes);
    std::vector<MomentAccumulator> f_acc(n_nodes);
    for (const Sample& s : chain.samples)
        for (std::size_t n = 0; n < n_nodes; ++n) {
            const double f = s.f[static_cast<Eigen::Index>(n)];
            sigma_acc[n].add(std::exp(f + s.mu_f));
            f_acc[n].add(f);
        }

    out.mean_sigma.resize(static_cast<Eigen::Index>(n_nodes));
    out.sd_sigma.resize(static_cast<Eigen::Index>(n_nodes));
    out.map_sigma.resize(static_cast<Eigen::Index>(n_nodes));
    out.mean_f.resize(static_cast<Eigen::Index>(n_nodes));
    out.sd_f.resize(static_cast<Eigen::Index>(n_nodes));
    const Sample& map = chain.samples[out.map_index];
    for (std::size_t n = 0; n < n_nodes; ++n) {
        const Eigen::Index e = static_cast<Eigen::Index>(n);
        out.mean_sigma[e] = sigma_acc[n].mean();
        out.sd_sigma[e] = sigma_acc[n].sd();
        out.map_sigma[e] = std::exp(map.f[e] + map.mu_f);
        out.mean_f[e] = f_acc[n].mean();
        out.sd_f[e] = f_acc[n].sd();
    }
    return out;
}

RepriceReport reprice(const Chain& chain, const MarketData& data, std::size_t subsample,
                      const PricerConfig& config) {
    if (chain.samples.empty()) throw validation_error("reprice: empty chain");
    if (subsample == 0 || subsample > chain.samples.size())
        throw validation_error("reprice: subsample must be in [1, chain length]");
    data.validate();

    const std::size_t n_chain = chain.samples.size();
    std::vector<std::size_t> selected;
    selected.reserve(subsample);
    for (std::size_t k = 0; k < subsample; ++k)
        selected.push_back(k * n_chain / subsample);

    const std::size_t n_quotes = data.quotes.size();
    std::vector<MomentAccumulator> price_acc(n_quotes);
    std::vector<MomentAccumulator> iv_acc(n_quotes);

    const auto quote_prices = [&](const Sample& s) {
        const PriceSurface surface = dupire_price_surface(
            LogVolSurface(chain.grid, s.f), s.mu_f, data.spot, data.rate, config);
        return prices_at_quotes(surface, data);
    };

    for (std::size_t idx : selected) {
        const std::vector<double> prices = quote_prices(chain.samples[idx]);
        for (std::size_t q = 0; q < n_quotes; ++q) {
            price_acc[q].add(prices[q]);
            try {
                iv_acc[q].add(implied_volatility(prices[q], data.spot,
                                                 data.quotes[q].strike,
                                                 data.quotes[q].maturity, data.rate));
            } catch (const std::domain_error&) {
            } catch (const numerical_error&) {
            }
        }
    }

    const std::size_t map_index = map_sample_index(chain);
    const std::vector<double> map_prices = quote_prices(chain.samples[map_index]);

    RepriceReport report;
    report.rows.resize(n_quotes);
    MomentAccumulator error_acc;
    for (std::size_t q = 0; q < n_quotes; ++q) {
        QuoteReprice& row = report.rows[q];
        row.quote = data.quotes[q];
        row.price_mean = price_acc[q].mean();
        row.price_sd = price_acc[q].sd();
        row.iv_mean = iv_acc[q].mean();
        row.iv_sd = iv_acc[q].sd();
        row.iv_count = iv_acc[q].count();
        row.map_price = map_prices[q];
        try {
            row.map_iv = implied_volatility(row.map_price, data.spot, row.quote.strike,
                                            row.quote.maturity, data.rate);
            row.map_iv_ok = true;
        } catch (const std::domain_error&) {
        } catch (const numerical_error&) {
        }
        try {
            row.market_iv = implied_volatility(row.quote.mid(), data.spot,
                                               row.quote.strike, row.quote.maturity,
                                               data.rate);
            row.market_iv_ok = true;
        } catch (const std::domain_error&) {
        } catch (const numerical_error&) {
        }
        if (row.map_iv_ok && row.market_iv_ok) error_acc.add(row.map_iv - row.market_iv);
    }
    report.map_iv_error_mean = error_acc.mean();
    report.map_iv_error_sd = error_acc.sd();
    report.n_scored = error_acc.count();
    return report;
}

PredictiveSample predict(const Chain& chain,
                         const std::vector<std::pair<double, double>>& new_points,
                         std::size_t n_states, std::size_t n_draws_per_state, Rng& rng) {
    if (chain.samples.empty()) throw validation_error("predict: empty chain");
    if (n_states == 0 || n_states > chain.samples.size())
        throw validation_error("predict: n_states must be in [1, chain length]");
    if (n_draws_per_state == 0)
        throw validation_error("predict: n_draws_per_state must be positive");
    for (const auto& [t, k] : new_points)
        if (!std::isfinite(chain.grid.unit_maturity(t)) ||
            !std::isfinite(chain.grid.unit_strike(k)))
            throw validation_error("predict: non-finite scaled coordinates");

    PredictiveSample out;
    out.points = new_points;
    out.surfaces.reserve(n_states * n_draws_per_state);
    out.provenance.reserve(n_states * n_draws_per_state);

    const std::vector<std::size_t> states =
        rng.sample_without_replacement(chain.samples.size(), n_states);

    const Eigen::Index m = static_cast<Eigen::Index>(new_points.size());
    for (std::size_t state_index : states) {
        const Sample& s = chain.samples[state_index];
        const KroneckerCholesky chol(chain.grid, s.kappa);
        const PredictiveDensity cond =
            conditional_predictive(chol, chain.grid, s.kappa, s.f, new_points);
        const Eigen::MatrixXd factor = jittered_dense_cholesky(cond.cov);
        for (std::size_t d = 0; d < n_draws_per_state; ++d) {
            Eigen::VectorXd white(m);
            for (Eigen::Index i = 0; i < m; ++i) white[i] = rng.normal();
            const Eigen::VectorXd draw = cond.mean + factor * white;
            out.surfaces.push_back((draw.array() + s.mu_f).exp().matrix());
            out.provenance.emplace_back(state_index, d);
        }
    }
    return out;
}

PredictiveSummary summarize_predictive(const PredictiveSample& sample) {
    if (sample.surfaces.empty())
        throw validation_error("summarize_predictive: no surfaces");
    const Eigen::Index m = static_cast<Eigen::Index>(sample.points.size());
    std::vector<MomentAccumulator> acc(static_cast<std::size_t>(m));
    for (const Eigen::VectorXd& surface : sample.surfaces)
        for (Eigen::Index i = 0; i < m; ++i)
            acc[static_cast<std::size_t>(i)].add(surface[i]);

    PredictiveSummary out;
    out.mean_sigma.resize(m);
    out.sd_sigma.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        out.mean_sigma[i] = acc[static_cast<std::size_t>(i)].mean();
        out.sd_sigma[i] = acc[static_cast<std::size_t>(i)].sd();
    }
    return out;
}

} // namespace volcal
