#include "volcal/chain_io.hpp"

#include "volcal/errors.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace volcal {

namespace {

constexpr char kMagic[8] = {'V', 'O', 'L', 'C', 'H', 'N', '0', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64_block(std::ofstream& out, const double* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw validation_error("chain file truncated: " + path);
    return v;
}

double read_f64(std::ifstream& in, const std::string& path) {
    double v = 0.0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw validation_error("chain file truncated: " + path);
    return v;
}

void read_f64_block(std::ifstream& in, double* data, std::size_t count,
                    const std::string& path) {
    if (!in.read(reinterpret_cast<char*>(data),
                 static_cast<std::streamsize>(count * sizeof(double))))
        throw validation_error("chain file truncated: " + path);
}

} // namespace

void save_chain(const Chain& chain, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write chain file: " + path);

    out.write(kMagic, sizeof(kMagic));
    write_u64(out, chain.config.n_iterations);
    write_u64(out, chain.config.burn_in);
    write_u64(out, chain.config.thin);
    write_u64(out, chain.config.seed);
    write_f64(out, chain.config.surrogate_noise_scale);

    write_f64(out, chain.bounds.sigma_f_max);
    write_f64(out, chain.bounds.ell_T_max);
    write_f64(out, chain.bounds.ell_K_max);
    write_f64(out, chain.bounds.sigma_eps_max);
    write_f64(out, chain.bounds.mu_f_lo);
    write_f64(out, chain.bounds.mu_f_hi);

    write_u64(out, chain.grid.n_maturities());
    write_u64(out, chain.grid.n_strikes());
    write_f64_block(out, chain.grid.maturities().data(), chain.grid.n_maturities());
    write_f64_block(out, chain.grid.strikes().data(), chain.grid.n_strikes());

    write_f64(out, chain.diagnostics.mean_evals_f);
    write_f64(out, chain.diagnostics.mean_evals_kappa);
    write_f64(out, chain.diagnostics.mean_evals_noise_mean);

    write_u64(out, chain.samples.size());
    write_u64(out, chain.grid.size());
    for (const Sample& s : chain.samples) {
        write_f64_block(out, s.f.data(), static_cast<std::size_t>(s.f.size()));
        write_f64(out, s.kappa.sigma_f);
        write_f64(out, s.kappa.ell_T);
        write_f64(out, s.kappa.ell_K);
        write_f64(out, s.sigma_eps);
        write_f64(out, s.mu_f);
        write_f64(out, s.log_posterior);
    }
    if (!out) throw validation_error("failed writing chain file: " + path);
}

Chain load_chain(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open chain file: " + path);

    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw validation_error("not a chain file: " + path);

    Chain chain;
    chain.config.n_iterations = read_u64(in, path);
    chain.config.burn_in = read_u64(in, path);
    chain.config.thin = read_u64(in, path);
    chain.config.seed = read_u64(in, path);
    chain.config.surrogate_noise_scale = read_f64(in, path);

    chain.bounds.sigma_f_max = read_f64(in, path);
    chain.bounds.ell_T_max = read_f64(in, path);
    chain.bounds.ell_K_max = read_f64(in, path);
    chain.bounds.sigma_eps_max = read_f64(in, path);
    chain.bounds.mu_f_lo = read_f64(in, path);
    chain.bounds.mu_f_hi = read_f64(in, path);

    const std::size_t rows = read_u64(in, path);
    const std::size_t cols = read_u64(in, path);
    std::vector<double> maturities(rows);
    std::vector<double> strikes(cols);
    read_f64_block(in, maturities.data(), rows, path);
    read_f64_block(in, strikes.data(), cols, path);
    chain.grid = Grid(std::move(maturities), std::move(strikes));

    chain.diagnostics.mean_evals_f = read_f64(in, path);
    chain.diagnostics.mean_evals_kappa = read_f64(in, path);
    chain.diagnostics.mean_evals_noise_mean = read_f64(in, path);

    const std::size_t n_samples = read_u64(in, path);
    const std::size_t n_nodes = read_u64(in, path);
    if (n_nodes != chain.grid.size())
        throw validation_error("chain file node count does not match grid: " + path);

    chain.samples.resize(n_samples);
    for (Sample& s : chain.samples) {
        s.f.resize(static_cast<Eigen::Index>(n_nodes));
        read_f64_block(in, s.f.data(), n_nodes, path);
        s.kappa.sigma_f = read_f64(in, path);
        s.kappa.ell_T = read_f64(in, path);
        s.kappa.ell_K = read_f64(in, path);
        s.sigma_eps = read_f64(in, path);
        s.mu_f = read_f64(in, path);
        s.log_posterior = read_f64(in, path);
    }
    return chain;
}

void write_chain_summary(const Chain& chain, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write chain summary: " + path);
    out << "sample,sigma_f,ell_T,ell_K,sigma_eps,mu_f,log_posterior\n";
    char buffer[256];
    for (std::size_t s = 0; s < chain.samples.size(); ++s) {
        const Sample& sample = chain.samples[s];
        std::snprintf(buffer, sizeof(buffer), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      s, sample.kappa.sigma_f, sample.kappa.ell_T, sample.kappa.ell_K,
                      sample.sigma_eps, sample.mu_f, sample.log_posterior);
        out << buffer;
    }
    if (!out) throw validation_error("failed writing chain summary: " + path);
}

} // namespace volcal
