#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace volcal {

// FNV-1a 64-bit hash; used to derive independent named sub-streams from one
// run seed so that adding a consumer never shifts the draws of another.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Deterministic RNG. Distribution transforms are implemented here rather
// than with std:: distributions, whose output is not pinned by the standard;
// a seed therefore reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng substream(std::uint64_t seed, std::string_view label) {
        return Rng(seed ^ fnv1a64(label));
    }

    // U(0,1), excludes both endpoints.
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller; pairs are cached.
    double normal();

    // U{0, ..., n-1} without modulo bias.
    std::uint64_t below(std::uint64_t n);

    // k distinct indices from {0, ..., n-1} via partial Fisher-Yates,
    // returned in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace volcal
