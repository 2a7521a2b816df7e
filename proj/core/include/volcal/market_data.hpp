#pragma once

#include <string>
#include <vector>

namespace volcal {

// One European call quote. mid() is the exact average of bid and ask.
struct OptionQuote {
    double maturity = 0.0;
    double strike = 0.0;
    double bid = 0.0;
    double ask = 0.0;

    double mid() const { return 0.5 * (bid + ask); }
};

// A quote set under a single spot and flat short rate.
struct MarketData {
    double spot = 0.0;
    double rate = 0.0;
    std::vector<OptionQuote> quotes;

    // Throws validation_error unless spot > 0, rate >= 0, quotes is
    // non-empty, every quote has maturity > 0, strike > 0, 0 <= bid <= ask,
    // and no two quotes share the same (maturity, strike).
    void validate() const;
};

// Reads a quote CSV:
//   # spot=100.0
//   # rate=0.02
//   T,K,bid,ask
//   0.25,90,11.2,11.6
// Both metadata lines are required. Errors carry the offending line number.
// The returned quotes are sorted by (maturity, strike) and validated.
MarketData load_quotes(const std::string& path);

// Writes the same format with round-trip precision.
void save_quotes(const MarketData& data, const std::string& path);

} // namespace volcal
