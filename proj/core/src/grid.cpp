#include "volcal/grid.hpp"

#include "volcal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace volcal {

Grid::Grid(std::vector<double> maturities, std::vector<double> strikes)
    : maturities_(std::move(maturities)), strikes_(std::move(strikes)) {
    if (maturities_.size() < 2) throw validation_error("grid: need at least 2 maturities");
    if (strikes_.size() < 2) throw validation_error("grid: need at least 2 strikes");
    for (double t : maturities_)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw validation_error("grid: maturities must be finite and non-negative");
    for (double k : strikes_)
        if (!(k > 0.0) || !std::isfinite(k))
            throw validation_error("grid: strikes must be finite and positive");
    if (!std::is_sorted(maturities_.begin(), maturities_.end()) ||
        std::adjacent_find(maturities_.begin(), maturities_.end()) != maturities_.end())
        throw validation_error("grid: maturities must be strictly increasing");
    if (!std::is_sorted(strikes_.begin(), strikes_.end()) ||
        std::adjacent_find(strikes_.begin(), strikes_.end()) != strikes_.end())
        throw validation_error("grid: strikes must be strictly increasing");
    t_span_ = maturities_.back() - maturities_.front();
    k_span_ = strikes_.back() - strikes_.front();
}

std::size_t Grid::row_of(double T) const {
    const auto it = std::find(maturities_.begin(), maturities_.end(), T);
    if (it == maturities_.end())
        throw validation_error("grid: maturity " + std::to_string(T) + " is not a node");
    return static_cast<std::size_t>(it - maturities_.begin());
}

std::size_t Grid::col_of(double K) const {
    const auto it = std::find(strikes_.begin(), strikes_.end(), K);
    if (it == strikes_.end())
        throw validation_error("grid: strike " + std::to_string(K) + " is not a node");
    return static_cast<std::size_t>(it - strikes_.begin());
}

LogVolSurface::LogVolSurface(Grid g, Eigen::VectorXd v)
    : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.size())
        throw validation_error("log-vol surface: value count does not match grid size");
}

Grid build_grid(const MarketData& data, std::size_t target_rows, std::size_t target_cols,
                double margin_lo, double margin_hi) {
    data.validate();
    if (!(margin_lo > 0.0) || !(margin_hi > margin_lo))
        throw validation_error("build_grid: bad margin factors");

    std::set<double> maturity_set;
    std::set<double> strike_set;
    for (const OptionQuote& q : data.quotes) {
        maturity_set.insert(q.maturity);
        strike_set.insert(q.strike);
    }

    std::vector<double> maturities(maturity_set.begin(), maturity_set.end());
    if (maturities.size() > target_rows)
        throw validation_error("build_grid: more distinct quote maturities than target rows");
    // Pad beyond the last maturity, keeping the mean quote spacing.
    double step = maturities.size() > 1
                      ? (maturities.back() - maturities.front()) /
                            static_cast<double>(maturities.size() - 1)
                      : maturities.back();
    while (maturities.size() < target_rows)
        maturities.push_back(maturities.back() + step);

    std::vector<double> strikes(strike_set.begin(), strike_set.end());
    const double lo_required = margin_lo * data.spot;
    const double hi_required = margin_hi * data.spot;
    // Relative slack so a quote pinned at a margin does not force a duplicate.
    if (strikes.front() > lo_required * (1.0 + 1e-12))
        strikes.insert(strikes.begin(), lo_required);
    if (strikes.back() < hi_required * (1.0 - 1e-12)) strikes.push_back(hi_required);
    if (strikes.size() > target_cols)
        throw validation_error(
            "build_grid: target columns cannot hold the quote strikes plus margins");
    while (strikes.size() < target_cols) {
        std::size_t widest = 0;
        double width = strikes[1] - strikes[0];
        for (std::size_t j = 1; j + 1 < strikes.size(); ++j) {
            const double w = strikes[j + 1] - strikes[j];
            if (w > width) {
                width = w;
                widest = j;
            }
        }
        strikes.insert(strikes.begin() + static_cast<std::ptrdiff_t>(widest) + 1,
                       0.5 * (strikes[widest] + strikes[widest + 1]));
    }

    return Grid(std::move(maturities), std::move(strikes));
}

} // namespace volcal
