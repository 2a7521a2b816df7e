#pragma once

#include "volcal/market_data.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <utility>
#include <vector>

namespace volcal {

// Rectangular (maturity, strike) lattice. Maturities are strictly increasing
// and non-negative, strikes strictly increasing and positive; at least two of
// each. Nodes are flattened maturity-major: node (i, j) has index i * J + j.
class Grid {
public:
    Grid() = default;
    // Validates and freezes the scaling map.
    Grid(std::vector<double> maturities, std::vector<double> strikes);

    std::size_t n_maturities() const { return maturities_.size(); }
    std::size_t n_strikes() const { return strikes_.size(); }
    std::size_t size() const { return maturities_.size() * strikes_.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * n_strikes() + j; }

    const std::vector<double>& maturities() const { return maturities_; }
    const std::vector<double>& strikes() const { return strikes_; }
    double maturity(std::size_t i) const { return maturities_[i]; }
    double strike(std::size_t j) const { return strikes_[j]; }

    // Affine map onto the unit square; grid extremes land exactly on 0 and 1.
    double unit_maturity(double T) const { return (T - maturities_.front()) / t_span_; }
    double unit_strike(double K) const { return (K - strikes_.front()) / k_span_; }
    std::pair<double, double> to_unit(double T, double K) const {
        return {unit_maturity(T), unit_strike(K)};
    }

    // Exact-match node lookup; throws validation_error when absent.
    std::size_t row_of(double T) const;
    std::size_t col_of(double K) const;

private:
    std::vector<double> maturities_;
    std::vector<double> strikes_;
    double t_span_ = 1.0;
    double k_span_ = 1.0;
};

// Log-volatility field on grid nodes, maturity-major; the local vol at node
// n is exp(values[n] + mu_f).
struct LogVolSurface {
    Grid grid;
    Eigen::VectorXd values;

    LogVolSurface() = default;
    LogVolSurface(Grid g, Eigen::VectorXd v);

    double value(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
};

// Builds the inference grid from quotes. Maturities are the distinct quote
// maturities padded beyond the last with evenly spaced nodes up to
// target_rows. Strikes are the distinct quote strikes, extended so the span
// covers at least [margin_lo * spot, margin_hi * spot], then filled up to
// target_cols by bisecting the widest gap (leftmost on ties). Quote
// coordinates are preserved bit-exactly. Throws validation_error when the
// targets cannot accommodate the distinct coordinates.
Grid build_grid(const MarketData& data, std::size_t target_rows, std::size_t target_cols,
                double margin_lo = 0.3, double margin_hi = 2.2);

} // namespace volcal
