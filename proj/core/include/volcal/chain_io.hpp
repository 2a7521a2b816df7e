#pragma once

#include "volcal/sampler.hpp"

#include <string>

namespace volcal {

// Binary chain dump (config, bounds, grid, diagnostics, samples); the
// round trip load_chain(save_chain(c)) is bit-exact.
void save_chain(const Chain& chain, const std::string& path);
Chain load_chain(const std::string& path);

// Per-sample hyperparameter and log-posterior traces as CSV.
void write_chain_summary(const Chain& chain, const std::string& path);

} // namespace volcal
