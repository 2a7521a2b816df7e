#include "volcal/market_data.hpp"

#include "volcal/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace volcal {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
    const std::string text = trim(field);
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw validation_error(path + ":" + std::to_string(line_no) +
                               ": expected a number, got '" + text + "'");
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

} // namespace

void MarketData::validate() const {
    if (!(spot > 0.0)) throw validation_error("market data: spot must be positive");
    if (!(rate >= 0.0)) throw validation_error("market data: rate must be non-negative");
    if (quotes.empty()) throw validation_error("market data: no quotes");
    for (const OptionQuote& q : quotes) {
        if (!(q.maturity > 0.0))
            throw validation_error("market data: quote maturity must be positive");
        if (!(q.strike > 0.0))
            throw validation_error("market data: quote strike must be positive");
        if (!(q.bid >= 0.0) || !(q.ask >= q.bid))
            throw validation_error("market data: quote requires 0 <= bid <= ask");
    }
    std::vector<std::pair<double, double>> keys;
    keys.reserve(quotes.size());
    for (const OptionQuote& q : quotes) keys.emplace_back(q.maturity, q.strike);
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        throw validation_error("market data: duplicate (maturity, strike) quote");
}

MarketData load_quotes(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw validation_error("cannot open quote file: " + path);

    MarketData data;
    bool have_spot = false;
    bool have_rate = false;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(file, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty()) continue;

        if (text[0] == '#') {
            const std::string meta = trim(text.substr(1));
            const std::size_t eq = meta.find('=');
            if (eq == std::string::npos)
                throw validation_error(path + ":" + std::to_string(line_no) +
                                       ": metadata must be '# key=value'");
            const std::string key = trim(meta.substr(0, eq));
            const std::string value = meta.substr(eq + 1);
            if (key == "spot") {
                data.spot = parse_double(value, path, line_no);
                have_spot = true;
            } else if (key == "rate") {
                data.rate = parse_double(value, path, line_no);
                have_rate = true;
            } else {
                throw validation_error(path + ":" + std::to_string(line_no) +
                                       ": unknown metadata key '" + key + "'");
            }
            continue;
        }

        if (!have_header) {
            std::string compact;
            for (char c : text)
                if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
            if (compact != "T,K,bid,ask")
                throw validation_error(path + ":" + std::to_string(line_no) +
                                       ": expected header 'T,K,bid,ask'");
            have_header = true;
            continue;
        }

        const std::vector<std::string> fields = split_fields(text);
        if (fields.size() != 4)
            throw validation_error(path + ":" + std::to_string(line_no) +
                                   ": expected 4 fields, got " +
                                   std::to_string(fields.size()));
        OptionQuote q;
        q.maturity = parse_double(fields[0], path, line_no);
        q.strike = parse_double(fields[1], path, line_no);
        q.bid = parse_double(fields[2], path, line_no);
        q.ask = parse_double(fields[3], path, line_no);
        data.quotes.push_back(q);
    }

    if (!have_spot) throw validation_error(path + ": missing '# spot=' metadata");
    if (!have_rate) throw validation_error(path + ": missing '# rate=' metadata");
    if (!have_header) throw validation_error(path + ": missing 'T,K,bid,ask' header");

    std::sort(data.quotes.begin(), data.quotes.end(),
              [](const OptionQuote& a, const OptionQuote& b) {
                  if (a.maturity != b.maturity) return a.maturity < b.maturity;
                  return a.strike < b.strike;
              });
    data.validate();
    return data;
}

void save_quotes(const MarketData& data, const std::string& path) {
    data.validate();
    std::ofstream file(path);
    if (!file) throw validation_error("cannot write quote file: " + path);
    char buffer[512];
    std::snprintf(buffer, sizeof(buffer), "# spot=%.17g\n# rate=%.17g\nT,K,bid,ask\n",
                  data.spot, data.rate);
    file << buffer;
    for (const OptionQuote& q : data.quotes) {
        std::snprintf(buffer, sizeof(buffer), "%.17g,%.17g,%.17g,%.17g\n",
                      q.maturity, q.strike, q.bid, q.ask);
        file << buffer;
    }
    if (!file) throw validation_error("failed writing quote file: " + path);
}

} // namespace volcal
