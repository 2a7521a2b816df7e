#include "volcal/chain_io.hpp"

#include "volcal/errors.hpp"
#include "volcal/rng.hpp"
#include "volcal/sampler.hpp"

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using volcal::Chain;
using volcal::Grid;
using volcal::Rng;
using volcal::Sample;
using volcal::load_chain;
using volcal::save_chain;
using volcal::validation_error;
using volcal::write_chain_summary;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;

    TempDir() {
        path = fs::temp_directory_path() /
               ("volcal_chain_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

Chain make_chain() {
    Chain chain;
    chain.config.n_iterations = 123;
    chain.config.burn_in = 17;
    chain.config.thin = 3;
    chain.config.seed = 0xDEADBEEFCAFEF00DULL;
    chain.config.surrogate_noise_scale = 0.37;
    chain.bounds.sigma_f_max = 1.25;
    chain.bounds.ell_T_max = 0.8;
    chain.bounds.ell_K_max = 0.9;
    chain.bounds.sigma_eps_max = 0.6;
    chain.bounds.mu_f_lo = -4.0;
    chain.bounds.mu_f_hi = -0.5;
    chain.grid = Grid({0.25, 1.0 / 3.0, 2.0}, {30.0, 100.0 / 7.0 + 90.0, 220.0});
    chain.diagnostics.mean_evals_f = 3.25;
    chain.diagnostics.mean_evals_kappa = 7.5;
    chain.diagnostics.mean_evals_noise_mean = 2.125;

    Rng rng(55);
    for (int s = 0; s < 4; ++s) {
        Sample sample;
        sample.f.resize(9);
        for (Eigen::Index i = 0; i < 9; ++i) sample.f[i] = rng.normal();
        sample.kappa.sigma_f = rng.uniform(0.01, 1.0);
        sample.kappa.ell_T = rng.uniform(0.01, 1.0);
        sample.kappa.ell_K = rng.uniform(0.01, 1.0);
        sample.sigma_eps = rng.uniform(0.01, 0.5);
        sample.mu_f = rng.uniform(-4.0, -0.5);
        sample.log_posterior = rng.normal() * 100.0;
        chain.samples.push_back(sample);
    }
    return chain;
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

} // namespace

TEST_SUITE("chain_io") {

TEST_CASE("round trip preserves every field bit for bit") {
    TempDir tmp;
    const Chain chain = make_chain();
    const std::string path = tmp.file("chain.bin");
    save_chain(chain, path);
    const Chain back = load_chain(path);

    CHECK(back.config.n_iterations == chain.config.n_iterations);
    CHECK(back.config.burn_in == chain.config.burn_in);
    CHECK(back.config.thin == chain.config.thin);
    CHECK(back.config.seed == chain.config.seed);
    CHECK(back.config.surrogate_noise_scale == chain.config.surrogate_noise_scale);

    CHECK(back.bounds.sigma_f_max == chain.bounds.sigma_f_max);
    CHECK(back.bounds.ell_T_max == chain.bounds.ell_T_max);
    CHECK(back.bounds.ell_K_max == chain.bounds.ell_K_max);
    CHECK(back.bounds.sigma_eps_max == chain.bounds.sigma_eps_max);
    CHECK(back.bounds.mu_f_lo == chain.bounds.mu_f_lo);
    CHECK(back.bounds.mu_f_hi == chain.bounds.mu_f_hi);

    REQUIRE(back.grid.n_maturities() == chain.grid.n_maturities());
    REQUIRE(back.grid.n_strikes() == chain.grid.n_strikes());
    for (std::size_t i = 0; i < chain.grid.n_maturities(); ++i)
        CHECK(back.grid.maturity(i) == chain.grid.maturity(i));
    for (std::size_t j = 0; j < chain.grid.n_strikes(); ++j)
        CHECK(back.grid.strike(j) == chain.grid.strike(j));

    CHECK(back.diagnostics.mean_evals_f == chain.diagnostics.mean_evals_f);
    CHECK(back.diagnostics.mean_evals_kappa == chain.diagnostics.mean_evals_kappa);
    CHECK(back.diagnostics.mean_evals_noise_mean ==
          chain.diagnostics.mean_evals_noise_mean);

    REQUIRE(back.samples.size() == chain.samples.size());
    for (std::size_t s = 0; s < chain.samples.size(); ++s) {
        CHECK((back.samples[s].f - chain.samples[s].f).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.samples[s].kappa.sigma_f == chain.samples[s].kappa.sigma_f);
        CHECK(back.samples[s].kappa.ell_T == chain.samples[s].kappa.ell_T);
        CHECK(back.samples[s].kappa.ell_K == chain.samples[s].kappa.ell_K);
        CHECK(back.samples[s].sigma_eps == chain.samples[s].sigma_eps);
        CHECK(back.samples[s].mu_f == chain.samples[s].mu_f);
        CHECK(back.samples[s].log_posterior == chain.samples[s].log_posterior);
    }
}

TEST_CASE("save load save produces identical bytes") {
    TempDir tmp;
    const Chain chain = make_chain();
    const std::string first = tmp.file("a.bin");
    const std::string second = tmp.file("b.bin");
    save_chain(chain, first);
    save_chain(load_chain(first), second);
    CHECK(slurp(first) == slurp(second));
}

TEST_CASE("an empty sample list survives the trip") {
    TempDir tmp;
    Chain chain = make_chain();
    chain.samples.clear();
    const std::string path = tmp.file("empty.bin");
    save_chain(chain, path);
    CHECK(load_chain(path).samples.empty());
}

TEST_CASE("corrupt files are rejected") {
    TempDir tmp;
    CHECK_THROWS_AS((void)load_chain(tmp.file("missing.bin")), validation_error);

    const std::string bad_magic = tmp.file("bad_magic.bin");
    {
        std::ofstream out(bad_magic, std::ios::binary);
        out << "NOTCHAIN and then some";
    }
    CHECK_THROWS_AS((void)load_chain(bad_magic), validation_error);

    const std::string truncated = tmp.file("truncated.bin");
    save_chain(make_chain(), truncated);
    const std::vector<char> bytes = slurp(truncated);
    {
        std::ofstream out(truncated, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 13));
    }
    CHECK_THROWS_AS((void)load_chain(truncated), validation_error);

    // Too short for even the magic.
    const std::string stub = tmp.file("stub.bin");
    {
        std::ofstream out(stub, std::ios::binary);
        out << "VOL";
    }
    CHECK_THROWS_AS((void)load_chain(stub), validation_error);

    CHECK_THROWS_AS(save_chain(make_chain(), tmp.file("no/dir/chain.bin")),
                    validation_error);
}

TEST_CASE("summary lists every sample with full precision") {
    TempDir tmp;
    const Chain chain = make_chain();
    const std::string path = tmp.file("summary.csv");
    write_chain_summary(chain, path);

    std::ifstream in(path);
    REQUIRE(bool(in));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "sample,sigma_f,ell_T,ell_K,sigma_eps,mu_f,log_posterior");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<double> values;
        std::getline(ss, field, ',');
        CHECK(std::stoull(field) == rows);
        while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
        REQUIRE(values.size() == 6);
        const Sample& s = chain.samples[rows];
        CHECK(values[0] == s.kappa.sigma_f);
        CHECK(values[1] == s.kappa.ell_T);
        CHECK(values[2] == s.kappa.ell_K);
        CHECK(values[3] == s.sigma_eps);
        CHECK(values[4] == s.mu_f);
        CHECK(values[5] == s.log_posterior);
        ++rows;
    }
    CHECK(rows == chain.samples.size());
}

} // TEST_SUITE
