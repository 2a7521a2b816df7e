#pragma once

#include "volcal/dupire_pricer.hpp"
#include "volcal/hyperprior.hpp"
#include "volcal/sampler.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace volcal {

struct GridTargets {
    std::size_t rows = 5;
    std::size_t cols = 12;
    double margin_lo = 0.3;
    double margin_hi = 2.2;
};

// Closed-form truth surfaces for synthetic experiments:
//   bump:     sigma(T, K) = base + amplitude * e^{-T / t_scale} * e^{-(K/S - 1)^2 / width}
//   constant: sigma = value
struct TruthSpec {
    std::string type = "bump";
    double base = 0.2;
    double amplitude = 0.1;
    double t_scale = 1.0;
    double width = 0.1;
    double value = 0.2;
};

struct SynthSpec {
    bool present = false;
    double spot = 0.0;
    double rate = 0.0;
    double noise_sd = 0.0;
    std::vector<double> maturities;
    std::vector<double> strikes;
    TruthSpec truth;
};

struct PredictionSpec {
    bool present = false;
    std::vector<double> maturities;
    std::vector<double> strikes;
    std::size_t n_states = 100;
    std::size_t n_draws_per_state = 10;
};

// One JSON file drives the whole pipeline. Strictly schema-validated:
// unknown keys and wrong types are rejected before any computation.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string quotes_path;
    std::string output_dir = ".";
    GridTargets grid;
    HyperBounds bounds;
    SamplerConfig sampler;
    PricerConfig pricer;
    SynthSpec synth;
    PredictionSpec prediction;
    std::size_t reprice_subsample = 100;
    std::size_t n_chains = 1;
};

RunConfig parse_run_config_text(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

} // namespace volcal
