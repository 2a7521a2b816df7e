#include "volcal/chain_io.hpp"
#include "volcal/errors.hpp"
#include "volcal/grid.hpp"
#include "volcal/likelihood.hpp"
#include "volcal/market_data.hpp"
#include "volcal/posterior.hpp"
#include "volcal/rng.hpp"
#include "volcal/run_config.hpp"
#include "volcal/sampler.hpp"
#include "volcal/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using namespace volcal;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw validation_error("cannot write file: " + path.string());
    return file;
}

void finish_output(std::ofstream& file, const fs::path& path) {
    file.flush();
    if (!file) throw validation_error("write failed: " + path.string());
}

std::function<double(double, double)> truth_function(const TruthSpec& truth, double spot) {
    if (truth.type == "constant") {
        const double value = truth.value;
        return [value](double, double) { return value; };
    }
    const double base = truth.base;
    const double amplitude = truth.amplitude;
    const double t_scale = truth.t_scale;
    const double width = truth.width;
    return [=](double maturity, double strike) {
        const double m = strike / spot - 1.0;
        return base + amplitude * std::exp(-maturity / t_scale) * std::exp(-m * m / width);
    };
}

std::vector<std::pair<double, double>> lattice_points(const std::vector<double>& maturities,
                                                      const std::vector<double>& strikes) {
    std::vector<std::pair<double, double>> points;
    points.reserve(maturities.size() * strikes.size());
    for (double maturity : maturities)
        for (double strike : strikes) points.emplace_back(maturity, strike);
    return points;
}

void write_surface_summary(const SurfaceSummary& summary, const fs::path& path) {
    std::ofstream file = open_output(path);
    file << "T,K,mean_sigma,sd_sigma,map_sigma,band_lo,band_hi\n";
    const Grid& grid = summary.grid;
    for (std::size_t i = 0; i < grid.n_maturities(); ++i)
        for (std::size_t j = 0; j < grid.n_strikes(); ++j) {
            const std::size_t n = grid.index(i, j);
            const double mean = summary.mean_sigma[static_cast<Eigen::Index>(n)];
            const double sd = summary.sd_sigma[static_cast<Eigen::Index>(n)];
            file << fmt(grid.maturities()[i]) << ',' << fmt(grid.strikes()[j]) << ','
                 << fmt(mean) << ',' << fmt(sd) << ','
                 << fmt(summary.map_sigma[static_cast<Eigen::Index>(n)]) << ','
                 << fmt(mean - 2.0 * sd) << ',' << fmt(mean + 2.0 * sd) << '\n';
        }
    finish_output(file, path);
}

void write_reprice(const RepriceReport& report, const fs::path& path) {
    std::ofstream file = open_output(path);
    file << "# map_iv_error_mean=" << fmt(report.map_iv_error_mean) << '\n';
    file << "# map_iv_error_sd=" << fmt(report.map_iv_error_sd) << '\n';
    file << "# n_scored=" << report.n_scored << '\n';
    file << "T,K,mid,price_mean,price_sd,iv_mean,iv_sd,iv_count,map_price,map_iv,market_iv\n";
    for (const QuoteReprice& row : report.rows) {
        file << fmt(row.quote.maturity) << ',' << fmt(row.quote.strike) << ','
             << fmt(row.quote.mid()) << ',' << fmt(row.price_mean) << ','
             << fmt(row.price_sd) << ',';
        if (row.iv_count > 0) file << fmt(row.iv_mean) << ',' << fmt(row.iv_sd);
        else file << ',';
        file << ',' << row.iv_count << ',' << fmt(row.map_price) << ',';
        if (row.map_iv_ok) file << fmt(row.map_iv);
        file << ',';
        if (row.market_iv_ok) file << fmt(row.market_iv);
        file << '\n';
    }
    finish_output(file, path);
}

void write_predictive(const PredictiveSample& sample, const fs::path& path) {
    std::ofstream file = open_output(path);
    file << "state,draw,T,K,sigma\n";
    for (std::size_t s = 0; s < sample.surfaces.size(); ++s) {
        const auto& [state, draw] = sample.provenance[s];
        for (std::size_t p = 0; p < sample.points.size(); ++p)
            file << state << ',' << draw << ',' << fmt(sample.points[p].first) << ','
                 << fmt(sample.points[p].second) << ','
                 << fmt(sample.surfaces[s][static_cast<Eigen::Index>(p)]) << '\n';
    }
    finish_output(file, path);
}

void write_truth_surface(const Grid& grid, const std::function<double(double, double)>& sigma,
                         const fs::path& path) {
    std::ofstream file = open_output(path);
    file << "T,K,sigma\n";
    for (double maturity : grid.maturities())
        for (double strike : grid.strikes())
            file << fmt(maturity) << ',' << fmt(strike) << ','
                 << fmt(sigma(maturity, strike)) << '\n';
    finish_output(file, path);
}

int cmd_synth(const RunConfig& config) {
    if (!config.synth.present)
        throw validation_error("config: synth section required by the synth command");
    if (config.quotes_path.empty())
        throw validation_error("config: quotes path required by the synth command");
    const SynthSpec& synth = config.synth;
    const Grid grid(synth.maturities, synth.strikes);
    const auto sigma = truth_function(synth.truth, synth.spot);
    const MarketData data = generate_synthetic(
        sigma, grid, lattice_points(synth.maturities, synth.strikes), synth.noise_sd,
        synth.spot, synth.rate, config.seed ^ fnv1a64("data"), config.pricer);
    save_quotes(data, config.quotes_path);
    const fs::path truth_path = fs::path(config.output_dir) / "truth_surface.csv";
    write_truth_surface(grid, sigma, truth_path);
    std::cout << "wrote " << data.quotes.size() << " quotes to " << config.quotes_path << '\n';
    std::cout << "wrote " << truth_path.string() << '\n';
    return 0;
}

Chain pool_chains(std::vector<Chain> chains) {
    Chain pooled = std::move(chains.front());
    for (std::size_t k = 1; k < chains.size(); ++k)
        pooled.samples.insert(pooled.samples.end(), chains[k].samples.begin(),
                              chains[k].samples.end());
    return pooled;
}

int cmd_calibrate(const RunConfig& config, const std::string& chain_path) {
    const fs::path out(config.output_dir);
    if (!chain_path.empty()) {
        const Chain chain = load_chain(chain_path);
        write_chain_summary(chain, (out / "chain_summary.csv").string());
        write_surface_summary(summarize(chain), out / "surface_summary.csv");
        std::cout << "re-summarized " << chain.samples.size() << " samples from "
                  << chain_path << '\n';
        return 0;
    }

    const MarketData data = load_quotes(config.quotes_path);
    const Grid grid = build_grid(data, config.grid.rows, config.grid.cols,
                                 config.grid.margin_lo, config.grid.margin_hi);
    const DupireLikelihood likelihood(data, grid, config.pricer);

    const std::size_t n_chains = config.n_chains;
    std::vector<SamplerConfig> configs(n_chains, config.sampler);
    for (std::size_t k = 0; k < n_chains; ++k) {
        const std::string label = k == 0 ? "chain" : "chain:" + std::to_string(k + 1);
        configs[k].seed = config.seed ^ fnv1a64(label);
    }

    std::vector<Chain> chains;
    chains.reserve(n_chains);
    if (n_chains == 1) {
        chains.push_back(run_chain(configs[0], likelihood, grid, config.bounds));
    } else {
        chains.resize(n_chains, Chain{configs[0], config.bounds, grid, {}, {}});
        std::vector<std::exception_ptr> failures(n_chains);
        std::vector<std::thread> workers;
        workers.reserve(n_chains);
        for (std::size_t k = 0; k < n_chains; ++k)
            workers.emplace_back([&, k] {
                try {
                    chains[k] = run_chain(configs[k], likelihood, grid, config.bounds);
                } catch (...) {
                    failures[k] = std::current_exception();
                }
            });
        for (std::thread& worker : workers) worker.join();
        for (const std::exception_ptr& failure : failures)
            if (failure) std::rethrow_exception(failure);
    }

    for (std::size_t k = 0; k < n_chains; ++k) {
        const std::string suffix = n_chains == 1 ? "" : "_" + std::to_string(k + 1);
        save_chain(chains[k], (out / ("chain" + suffix + ".bin")).string());
        write_chain_summary(chains[k], (out / ("chain_summary" + suffix + ".csv")).string());
        const ChainDiagnostics& d = chains[k].diagnostics;
        std::cout << "chain " << k + 1 << ": " << chains[k].samples.size()
                  << " samples (mean evals f=" << d.mean_evals_f
                  << " kappa=" << d.mean_evals_kappa
                  << " noise_mean=" << d.mean_evals_noise_mean << ")\n";
    }

    write_surface_summary(summarize(pool_chains(std::move(chains))),
                          out / "surface_summary.csv");
    std::cout << "wrote " << (out / "surface_summary.csv").string() << '\n';
    return 0;
}

fs::path default_chain_path(const RunConfig& config, const std::string& chain_path) {
    if (!chain_path.empty()) return chain_path;
    return fs::path(config.output_dir) / "chain.bin";
}

int cmd_reprice(const RunConfig& config, const std::string& chain_path) {
    const Chain chain = load_chain(default_chain_path(config, chain_path).string());
    const MarketData data = load_quotes(config.quotes_path);
    const std::size_t subsample = std::min(config.reprice_subsample, chain.samples.size());
    const RepriceReport report = reprice(chain, data, subsample, config.pricer);
    const fs::path path = fs::path(config.output_dir) / "reprice.csv";
    write_reprice(report, path);
    std::cout << "map iv error mean=" << report.map_iv_error_mean
              << " sd=" << report.map_iv_error_sd << " over " << report.n_scored
              << " quotes\n";
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_predict(const RunConfig& config, const std::string& chain_path) {
    if (!config.prediction.present)
        throw validation_error("config: prediction section required by the predict command");
    const Chain chain = load_chain(default_chain_path(config, chain_path).string());
    const std::vector<double>& strikes = config.prediction.strikes.empty()
                                             ? chain.grid.strikes()
                                             : config.prediction.strikes;
    Rng rng = Rng::substream(config.seed, "prediction");
    const PredictiveSample sample =
        predict(chain, lattice_points(config.prediction.maturities, strikes),
                config.prediction.n_states, config.prediction.n_draws_per_state, rng);
    const fs::path path = fs::path(config.output_dir) / "predictive.csv";
    write_predictive(sample, path);
    std::cout << sample.surfaces.size() << " predictive surfaces at "
              << sample.points.size() << " points\n";
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian calibration of a Dupire local volatility surface"};
    app.require_subcommand(1);

    std::string config_path;
    std::string chain_path;
    std::string out_dir;
    std::size_t chains_flag = 0;

    const auto add_common = [&](CLI::App* cmd, bool with_chain) {
        cmd->add_option("--config", config_path, "Run configuration JSON file")->required();
        cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
        if (with_chain) cmd->add_option("--chain", chain_path, "Existing chain file");
    };

    CLI::App* synth = app.add_subcommand("synth", "Write synthetic quotes and their truth surface");
    add_common(synth, false);
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Sample the posterior and write chain artifacts");
    add_common(calibrate, true);
    calibrate->add_option("--chains", chains_flag,
                          "Run this many independent chains concurrently");
    CLI::App* reprice_cmd =
        app.add_subcommand("reprice", "Re-price quotes under the posterior");
    add_common(reprice_cmd, true);
    CLI::App* predict_cmd =
        app.add_subcommand("predict", "Draw predictive surfaces at new points");
    add_common(predict_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config = load_run_config(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (chains_flag > 0) config.n_chains = chains_flag;
        fs::create_directories(config.output_dir);
        if (synth->parsed()) return cmd_synth(config);
        if (calibrate->parsed()) return cmd_calibrate(config, chain_path);
        if (reprice_cmd->parsed()) return cmd_reprice(config, chain_path);
        return cmd_predict(config, chain_path);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
