#include "volcal/run_config.hpp"

#include "volcal/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace volcal {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw validation_error("config: unknown key '" + item.key() + "' in " + where);
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw validation_error("config: missing required key " + where + "." + key);
    if (!obj.at(key).is_number())
        throw validation_error("config: " + where + "." + key + " must be a number");
    return obj.at(key).get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where,
                 double fallback) {
    if (!obj.contains(key)) return fallback;
    return require_number(obj, key, where);
}

std::size_t count_or(const json& obj, const std::string& key, const std::string& where,
                     std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned())
        throw validation_error("config: " + where + "." + key +
                               " must be a non-negative integer");
    return v.get<std::size_t>();
}

bool bool_or(const json& obj, const std::string& key, const std::string& where,
             bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw validation_error("config: " + where + "." + key + " must be a boolean");
    return v.get<bool>();
}

std::string string_or(const json& obj, const std::string& key, const std::string& where,
                      const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw validation_error("config: " + where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& obj, const std::string& key,
                                const std::string& where) {
    if (!obj.contains(key))
        throw validation_error("config: missing required key " + where + "." + key);
    const json& v = obj.at(key);
    if (!v.is_array())
        throw validation_error("config: " + where + "." + key + " must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number())
            throw validation_error("config: " + where + "." + key +
                                   " must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void parse_grid(const json& obj, GridTargets& grid) {
    reject_unknown_keys(obj, {"rows", "cols", "margin_lo", "margin_hi"}, "grid");
    grid.rows = count_or(obj, "rows", "grid", grid.rows);
    grid.cols = count_or(obj, "cols", "grid", grid.cols);
    grid.margin_lo = number_or(obj, "margin_lo", "grid", grid.margin_lo);
    grid.margin_hi = number_or(obj, "margin_hi", "grid", grid.margin_hi);
}

void parse_bounds(const json& obj, HyperBounds& bounds) {
    reject_unknown_keys(obj,
                        {"sigma_f_max", "ell_T_max", "ell_K_max", "sigma_eps_max",
                         "mu_f_lo", "mu_f_hi"},
                        "bounds");
    bounds.sigma_f_max = number_or(obj, "sigma_f_max", "bounds", bounds.sigma_f_max);
    bounds.ell_T_max = number_or(obj, "ell_T_max", "bounds", bounds.ell_T_max);
    bounds.ell_K_max = number_or(obj, "ell_K_max", "bounds", bounds.ell_K_max);
    bounds.sigma_eps_max = number_or(obj, "sigma_eps_max", "bounds", bounds.sigma_eps_max);
    bounds.mu_f_lo = number_or(obj, "mu_f_lo", "bounds", bounds.mu_f_lo);
    bounds.mu_f_hi = number_or(obj, "mu_f_hi", "bounds", bounds.mu_f_hi);
    bounds.validate();
}

void parse_sampler(const json& obj, SamplerConfig& sampler) {
    reject_unknown_keys(obj, {"n_iterations", "burn_in", "thin", "surrogate_noise_scale"},
                        "sampler");
    sampler.n_iterations = count_or(obj, "n_iterations", "sampler", sampler.n_iterations);
    sampler.burn_in = count_or(obj, "burn_in", "sampler", sampler.burn_in);
    sampler.thin = count_or(obj, "thin", "sampler", sampler.thin);
    sampler.surrogate_noise_scale =
        number_or(obj, "surrogate_noise_scale", "sampler", sampler.surrogate_noise_scale);
    sampler.validate();
}

void parse_pricer(const json& obj, PricerConfig& pricer) {
    reject_unknown_keys(obj, {"max_dt", "rannacher_steps", "rannacher_dt", "kink_smoothing"},
                        "pricer");
    pricer.max_dt = number_or(obj, "max_dt", "pricer", pricer.max_dt);
    pricer.rannacher_steps = static_cast<int>(
        count_or(obj, "rannacher_steps", "pricer",
                 static_cast<std::size_t>(pricer.rannacher_steps)));
    pricer.rannacher_dt = number_or(obj, "rannacher_dt", "pricer", pricer.rannacher_dt);
    pricer.kink_smoothing = bool_or(obj, "kink_smoothing", "pricer", pricer.kink_smoothing);
}

void parse_truth(const json& obj, TruthSpec& truth) {
    reject_unknown_keys(obj, {"type", "base", "amplitude", "t_scale", "width", "value"},
                        "synth.truth");
    truth.type = string_or(obj, "type", "synth.truth", truth.type);
    if (truth.type != "bump" && truth.type != "constant")
        throw validation_error("config: synth.truth.type must be 'bump' or 'constant'");
    truth.base = number_or(obj, "base", "synth.truth", truth.base);
    truth.amplitude = number_or(obj, "amplitude", "synth.truth", truth.amplitude);
    truth.t_scale = number_or(obj, "t_scale", "synth.truth", truth.t_scale);
    truth.width = number_or(obj, "width", "synth.truth", truth.width);
    truth.value = number_or(obj, "value", "synth.truth", truth.value);
}

void parse_synth(const json& obj, SynthSpec& synth) {
    reject_unknown_keys(obj, {"spot", "rate", "noise_sd", "maturities", "strikes", "truth"},
                        "synth");
    synth.present = true;
    synth.spot = require_number(obj, "spot", "synth");
    synth.rate = require_number(obj, "rate", "synth");
    synth.noise_sd = number_or(obj, "noise_sd", "synth", 0.0);
    synth.maturities = number_list(obj, "maturities", "synth");
    synth.strikes = number_list(obj, "strikes", "synth");
    if (obj.contains("truth")) parse_truth(obj.at("truth"), synth.truth);
}

void parse_prediction(const json& obj, PredictionSpec& prediction) {
    reject_unknown_keys(obj, {"maturities", "strikes", "n_states", "n_draws_per_state"},
                        "prediction");
    prediction.present = true;
    prediction.maturities = number_list(obj, "maturities", "prediction");
    if (obj.contains("strikes"))
        prediction.strikes = number_list(obj, "strikes", "prediction");
    prediction.n_states = count_or(obj, "n_states", "prediction", prediction.n_states);
    prediction.n_draws_per_state =
        count_or(obj, "n_draws_per_state", "prediction", prediction.n_draws_per_state);
}

} // namespace

RunConfig parse_run_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw validation_error("config: top level must be an object");

    reject_unknown_keys(root,
                        {"seed", "quotes", "output_dir", "grid", "bounds", "sampler",
                         "pricer", "synth", "prediction", "reprice_subsample", "chains"},
                        "top level");

    RunConfig config;
    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (!v.is_number_unsigned())
            throw validation_error("config: seed must be a non-negative integer");
        config.seed = v.get<std::uint64_t>();
    }
    config.quotes_path = string_or(root, "quotes", "top level", "");
    config.output_dir = string_or(root, "output_dir", "top level", config.output_dir);
    if (root.contains("grid")) parse_grid(root.at("grid"), config.grid);
    if (root.contains("bounds")) parse_bounds(root.at("bounds"), config.bounds);
    if (root.contains("sampler")) parse_sampler(root.at("sampler"), config.sampler);
    if (root.contains("pricer")) parse_pricer(root.at("pricer"), config.pricer);
    if (root.contains("synth")) parse_synth(root.at("synth"), config.synth);
    if (root.contains("prediction")) parse_prediction(root.at("prediction"), config.prediction);
    config.reprice_subsample =
        count_or(root, "reprice_subsample", "top level", config.reprice_subsample);
    config.n_chains = count_or(root, "chains", "top level", config.n_chains);
    if (config.n_chains == 0)
        throw validation_error("config: chains must be at least 1");
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw validation_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_run_config_text(buffer.str());
}

} // namespace volcal
