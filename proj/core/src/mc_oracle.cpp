#include "volcal/mc_oracle.hpp"

#include "volcal/errors.hpp"
#include "volcal/rng.hpp"

#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace volcal {

namespace {

struct BlockMoments {
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;
};

BlockMoments simulate_block(const std::function<double(double, double)>& sigma,
                            double spot, double rate, double strike, double maturity,
                            std::size_t n_paths, std::size_t n_steps, std::uint64_t seed) {
    Rng rng(seed);
    const double dt = maturity / static_cast<double>(n_steps);
    const double sqrt_dt = std::sqrt(dt);
    const double log_spot = std::log(spot);
    const double discount = std::exp(-rate * maturity);

    BlockMoments moments;
    for (std::size_t p = 0; p < n_paths; ++p) {
        double x = log_spot;
        double t = 0.0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double vol = sigma(t, std::exp(x));
            x += (rate - 0.5 * vol * vol) * dt + vol * sqrt_dt * rng.normal();
            t += dt;
        }
        if (!std::isfinite(x))
            throw numerical_error("mc_price_oracle: path diverged (vol blow-up?)");
        const double payoff = discount * std::max(std::exp(x) - strike, 0.0);
        ++moments.count;
        const double delta = payoff - moments.mean;
        moments.mean += delta / static_cast<double>(moments.count);
        moments.m2 += delta * (payoff - moments.mean);
    }
    return moments;
}

} // namespace

McEstimate mc_price_oracle(const std::function<double(double, double)>& sigma,
                           double spot, double rate, double strike, double maturity,
                           std::size_t n_paths, std::size_t n_steps, std::uint64_t seed) {
    if (!(spot > 0.0) || !(strike >= 0.0) || !(maturity > 0.0) || n_paths == 0 ||
        n_steps == 0)
        throw validation_error("mc_price_oracle: invalid input");

    constexpr std::size_t n_blocks = 16;
    const std::size_t per_block = n_paths / n_blocks;
    std::vector<BlockMoments> blocks(n_blocks);
    std::vector<std::exception_ptr> failures(n_blocks);
    std::vector<std::thread> workers;
    workers.reserve(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t count = per_block + (b < n_paths % n_blocks ? 1 : 0);
        const std::uint64_t block_seed =
            seed ^ fnv1a64("mc-block-" + std::to_string(b));
        workers.emplace_back([&, b, count, block_seed] {
            try {
                blocks[b] = simulate_block(sigma, spot, rate, strike, maturity, count,
                                           n_steps, block_seed);
            } catch (...) {
                failures[b] = std::current_exception();
            }
        });
    }
    for (std::thread& w : workers) w.join();
    for (const std::exception_ptr& failure : failures)
        if (failure) std::rethrow_exception(failure);

    // Sequential merge in block order keeps the result thread-count invariant.
    BlockMoments total;
    for (const BlockMoments& b : blocks) {
        if (b.count == 0) continue;
        const double n1 = static_cast<double>(total.count);
        const double n2 = static_cast<double>(b.count);
        const double delta = b.mean - total.mean;
        total.mean = (n1 * total.mean + n2 * b.mean) / (n1 + n2);
        total.m2 += b.m2 + delta * delta * n1 * n2 / (n1 + n2);
        total.count += b.count;
    }

    McEstimate out;
    out.price = total.mean;
    const double n = static_cast<double>(total.count);
    out.std_error = n > 1 ? std::sqrt(total.m2 / (n - 1.0) / n) : 0.0;
    return out;
}

} // namespace volcal
