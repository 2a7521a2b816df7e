#include "volcal/dupire_pricer.hpp"

#include "volcal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace volcal {

namespace {

// One theta-weighted step of the method of lines from t0 to t1. The interior
// tridiagonal solve is fused here to keep the likelihood hot path
// allocation-free.
class ForwardMarch {
public:
    ForwardMarch(const Grid& grid, const Eigen::MatrixXd& sigma, double spot, double rate)
        : grid_(grid), sigma_(sigma), spot_(spot), rate_(rate) {
        const std::size_t cols = grid.n_strikes();
        const std::vector<double>& strikes = grid.strikes();
        d1m_.resize(cols); d1c_.resize(cols); d1p_.resize(cols);
        d2m_.resize(cols); d2c_.resize(cols); d2p_.resize(cols);
        for (std::size_t j = 1; j + 1 < cols; ++j) {
            const double hm = strikes[j] - strikes[j - 1];
            const double hp = strikes[j + 1] - strikes[j];
            d1m_[j] = -hp / (hm * (hm + hp));
            d1c_[j] = (hp - hm) / (hm * hp);
            d1p_[j] = hm / (hp * (hm + hp));
            d2m_[j] = 2.0 / (hm * (hm + hp));
            d2c_[j] = -2.0 / (hm * hp);
            d2p_[j] = 2.0 / (hp * (hm + hp));
        }
        sig0_.resize(cols); sig1_.resize(cols);
        sub_.resize(cols); diag_.resize(cols); sup_.resize(cols);
        rhs_.resize(cols); scratch_.resize(cols);
        state_.resize(cols);
    }

    std::vector<double>& state() { return state_; }

    void step(double t0, double t1, double theta) {
        const double dt = t1 - t0;
        const std::size_t cols = state_.size();
        const std::vector<double>& strikes = grid_.strikes();
        sigma_row_at(t0, sig0_);
        sigma_row_at(t1, sig1_);

        const double boundary_lo = spot_ - strikes.front() * std::exp(-rate_ * t1);
        for (std::size_t j = 1; j + 1 < cols; ++j) {
            const double k = strikes[j];
            const double drift = -rate_ * k;
            const double diff0 = 0.5 * k * k * sig0_[j] * sig0_[j];
            const double diff1 = 0.5 * k * k * sig1_[j] * sig1_[j];

            const double lo0 = drift * d1m_[j] + diff0 * d2m_[j];
            const double mid0 = drift * d1c_[j] + diff0 * d2c_[j];
            const double hi0 = drift * d1p_[j] + diff0 * d2p_[j];
            rhs_[j] = state_[j] + (1.0 - theta) * dt *
                                      (lo0 * state_[j - 1] + mid0 * state_[j] +
                                       hi0 * state_[j + 1]);

            sub_[j] = -theta * dt * (drift * d1m_[j] + diff1 * d2m_[j]);
            diag_[j] = 1.0 - theta * dt * (drift * d1c_[j] + diff1 * d2c_[j]);
            sup_[j] = -theta * dt * (drift * d1p_[j] + diff1 * d2p_[j]);
        }
        rhs_[1] -= sub_[1] * boundary_lo;

        // Thomas sweep over interior nodes 1 .. cols-2.
        double pivot = diag_[1];
        if (!(std::abs(pivot) > 1e-300)) throw numerical_error("pricer: singular step matrix");
        scratch_[1] = sup_[1] / pivot;
        state_[1] = rhs_[1] / pivot;
        for (std::size_t j = 2; j + 1 < cols; ++j) {
            pivot = diag_[j] - sub_[j] * scratch_[j - 1];
            if (!(std::abs(pivot) > 1e-300))
                throw numerical_error("pricer: singular step matrix");
            scratch_[j] = sup_[j] / pivot;
            state_[j] = (rhs_[j] - sub_[j] * state_[j - 1]) / pivot;
        }
        for (std::size_t j = cols - 2; j-- > 1;)
            state_[j] -= scratch_[j] * state_[j + 1];

        state_.front() = boundary_lo;
        state_.back() = 0.0;
    }

private:
    // Node vols interpolated linearly in maturity, clamped outside the rows.
    void sigma_row_at(double t, std::vector<double>& out) const {
        const std::vector<double>& mats = grid_.maturities();
        const std::size_t rows = mats.size();
        const std::size_t cols = out.size();
        if (t <= mats.front()) {
            for (std::size_t j = 0; j < cols; ++j) out[j] = sigma_(0, j);
            return;
        }
        if (t >= mats.back()) {
            for (std::size_t j = 0; j < cols; ++j)
                out[j] = sigma_(static_cast<Eigen::Index>(rows - 1), j);
            return;
        }
        std::size_t hi = 1;
        while (mats[hi] < t) ++hi;
        const double w = (t - mats[hi - 1]) / (mats[hi] - mats[hi - 1]);
        for (std::size_t j = 0; j < cols; ++j)
            out[j] = (1.0 - w) * sigma_(static_cast<Eigen::Index>(hi - 1), j) +
                     w * sigma_(static_cast<Eigen::Index>(hi), j);
    }

    const Grid& grid_;
    const Eigen::MatrixXd& sigma_;
    double spot_;
    double rate_;
    std::vector<double> d1m_, d1c_, d1p_, d2m_, d2c_, d2p_;
    std::vector<double> sig0_, sig1_;
    std::vector<double> sub_, diag_, sup_, rhs_, scratch_;
    std::vector<double> state_;
};

// Payoff nodes, optionally replacing values in the cells straddling the spot
// with the exact cell average of the payoff.
void initial_condition(const Grid& grid, double spot, bool kink_smoothing,
                       std::vector<double>& out) {
    const std::vector<double>& strikes = grid.strikes();
    const std::size_t cols = strikes.size();
    for (std::size_t j = 0; j < cols; ++j) {
        out[j] = std::max(spot - strikes[j], 0.0);
        if (!kink_smoothing) continue;
        const double cell_lo = j > 0 ? 0.5 * (strikes[j - 1] + strikes[j]) : strikes[j];
        const double cell_hi =
            j + 1 < cols ? 0.5 * (strikes[j] + strikes[j + 1]) : strikes[j];
        if (cell_lo < spot && spot < cell_hi)
            out[j] = 0.5 * (spot - cell_lo) * (spot - cell_lo) / (cell_hi - cell_lo);
    }
}

} // namespace

PriceSurface dupire_price_surface(const LogVolSurface& sigma, double mu_f,
                                  double spot, double rate,
                                  const PricerConfig& config) {
    const Grid& grid = sigma.grid;
    const std::size_t rows = grid.n_maturities();
    const std::size_t cols = grid.n_strikes();
    if (static_cast<std::size_t>(sigma.values.size()) != grid.size())
        throw validation_error("pricer: log-vol values do not match grid");
    if (!(spot > 0.0)) throw validation_error("pricer: spot must be positive");
    if (!(rate >= 0.0)) throw validation_error("pricer: rate must be non-negative");
    if (!(config.max_dt > 0.0)) throw validation_error("pricer: max_dt must be positive");
    if (config.rannacher_steps < 0 || !(config.rannacher_dt >= 0.0))
        throw validation_error("pricer: bad startup configuration");
    if (grid.strikes().front() > 0.3 * spot * (1.0 + 1e-9) ||
        grid.strikes().back() < 2.0 * spot * (1.0 - 1e-9))
        throw validation_error("pricer: strike span must cover [0.3 S, 2 S]");

    Eigen::MatrixXd vols(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = std::exp(sigma.value(i, j) + mu_f);
            if (!std::isfinite(v)) throw numerical_error("pricer: non-finite local vol");
            vols(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }

    double first_positive = 0.0;
    for (double t : grid.maturities())
        if (t > 0.0) { first_positive = t; break; }
    const double startup_span = config.rannacher_dt * config.rannacher_steps;
    if (config.rannacher_dt > 0.0 && first_positive > 0.0 && startup_span >= first_positive)
        throw validation_error("pricer: implicit startup exceeds the first maturity");

    PriceSurface surface;
    surface.grid = grid;
    surface.spot = spot;
    surface.rate = rate;
    surface.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));

    ForwardMarch march(grid, vols, spot, rate);
    initial_condition(grid, spot, config.kink_smoothing, march.state());

    double t = 0.0;
    int implicit_left = config.rannacher_dt > 0.0 ? 0 : config.rannacher_steps;
    bool startup_done = config.rannacher_dt <= 0.0 || config.rannacher_steps == 0;

    for (std::size_t i = 0; i < rows; ++i) {
        const double maturity = grid.maturity(i);
        if (maturity == 0.0) {
            for (std::size_t j = 0; j < cols; ++j)
                surface.values(0, static_cast<Eigen::Index>(j)) =
                    std::max(spot - grid.strike(j), 0.0);
            continue;
        }
        if (!startup_done) {
            for (int s = 0; s < config.rannacher_steps; ++s) {
                march.step(t, t + config.rannacher_dt, 1.0);
                t += config.rannacher_dt;
            }
            startup_done = true;
        }
        const int n_sub = std::max(
            1, static_cast<int>(std::ceil((maturity - t) / config.max_dt - 1e-12)));
        const double dt = (maturity - t) / n_sub;
        for (int s = 0; s < n_sub; ++s) {
            const double theta = implicit_left > 0 ? 1.0 : 0.5;
            if (implicit_left > 0) --implicit_left;
            const double t1 = s + 1 == n_sub ? maturity : t + dt;
            march.step(t, t1, theta);
            t = t1;
        }
        for (std::size_t j = 0; j < cols; ++j)
            surface.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::max(march.state()[j], 0.0);
    }
    return surface;
}

std::vector<double> prices_at_quotes(const PriceSurface& surface, const MarketData& data) {
    std::vector<double> out;
    out.reserve(data.quotes.size());
    for (const OptionQuote& q : data.quotes) {
        const std::size_t i = surface.grid.row_of(q.maturity);
        const std::size_t j = surface.grid.col_of(q.strike);
        out.push_back(surface.value(i, j));
    }
    return out;
}

LikelihoodBreakdown log_likelihood_detail(const LogVolSurface& sigma, double mu_f,
                                          double sigma_eps, const MarketData& data,
                                          const PricerConfig& config) {
    if (!(sigma_eps > 0.0))
        throw std::domain_error("log_likelihood: sigma_eps must be positive");
    const PriceSurface surface =
        dupire_price_surface(sigma, mu_f, data.spot, data.rate, config);
    const std::vector<double> model = prices_at_quotes(surface, data);

    LikelihoodBreakdown out;
    for (std::size_t q = 0; q < model.size(); ++q) {
        const double resid = data.quotes[q].mid() - model[q];
        out.residual_sum_squares += resid * resid;
    }
    const double n = static_cast<double>(model.size());
    out.log_density = -0.5 * n * std::log(2.0 * std::numbers::pi * sigma_eps * sigma_eps) -
                      out.residual_sum_squares / (2.0 * sigma_eps * sigma_eps);
    return out;
}

double log_likelihood(const LogVolSurface& sigma, double mu_f, double sigma_eps,
                      const MarketData& data, const PricerConfig& config) {
    return log_likelihood_detail(sigma, mu_f, sigma_eps, data, config).log_density;
}

} // namespace volcal
