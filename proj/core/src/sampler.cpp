#include "volcal/sampler.hpp"

#include "volcal/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace volcal {

namespace {

GPHyperparams constrain_kappa(const Eigen::Vector3d& z, const HyperBounds& bounds) {
    GPHyperparams kappa;
    kappa.sigma_f = constrain(z[0], 0.0, bounds.sigma_f_max);
    kappa.ell_T = constrain(z[1], 0.0, bounds.ell_T_max);
    kappa.ell_K = constrain(z[2], 0.0, bounds.ell_K_max);
    return kappa;
}

// log N(w; 0, diag(lambda + s)) expressed through eigen-basis coefficients.
double log_marginal_eigen(const Eigen::VectorXd& w, const Eigen::VectorXd& lambda,
                          double s) {
    const Eigen::ArrayXd denom = lambda.array() + s;
    return -0.5 * (w.array().square() / denom).sum() - 0.5 * denom.log().sum() -
           0.5 * static_cast<double>(w.size()) * std::log(2.0 * std::numbers::pi);
}

} // namespace

void SamplerConfig::validate() const {
    if (n_iterations == 0 || burn_in >= n_iterations)
        throw validation_error("sampler config: need burn_in < n_iterations");
    if (thin == 0) throw validation_error("sampler config: thin must be at least 1");
    if (!(surrogate_noise_scale > 0.0) || !(surrogate_noise_scale <= 1.0))
        throw validation_error("sampler config: surrogate_noise_scale must be in (0, 1]");
}

EssResult ess_step(const Eigen::VectorXd& current, const Eigen::VectorXd& prior_draw,
                   const std::function<double(const Eigen::VectorXd&)>& log_lik,
                   double current_log_lik, Rng& rng) {
    if (std::isnan(current_log_lik))
        throw numerical_error("ess_step: current state has NaN log-likelihood");
    if (current.size() != prior_draw.size())
        throw validation_error("ess_step: prior draw size mismatch");

    const double threshold = current_log_lik + std::log(rng.uniform());
    double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double angle_min = angle - 2.0 * std::numbers::pi;
    double angle_max = angle;

    EssResult result;
    for (int iter = 0; iter < 10000; ++iter) {
        result.state = current * std::cos(angle) + prior_draw * std::sin(angle);
        double ll = log_lik(result.state);
        ++result.n_evals;
        if (std::isnan(ll)) ll = -std::numeric_limits<double>::infinity();
        if (ll > threshold) {
            result.log_lik = ll;
            return result;
        }
        if (angle < 0.0) angle_min = angle; else angle_max = angle;
        angle = rng.uniform(angle_min, angle_max);
    }
    throw numerical_error("ess_step: slice bracket failed to shrink");
}

ChainState init_state(const Grid& grid, const HyperBounds& bounds,
                      const SamplerConfig& config, const Likelihood& likelihood) {
    config.validate();
    bounds.validate();
    ChainState state;
    state.f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    state.kappa = constrain_kappa(state.z_kappa, bounds);
    state.sigma_eps = constrain(state.z_noise_mean[0], 0.0, bounds.sigma_eps_max);
    state.mu_f = constrain(state.z_noise_mean[1], bounds.mu_f_lo, bounds.mu_f_hi);
    state.chol = std::make_shared<KroneckerCholesky>(grid, state.kappa);
    state.log_lik = likelihood.log_density(state.f, state.mu_f, state.sigma_eps);
    if (std::isnan(state.log_lik))
        throw numerical_error("sampler: likelihood is NaN at the initial state");
    return state;
}

int update_f(ChainState& state, const Likelihood& likelihood, Rng& rng) {
    const Eigen::VectorXd prior_draw = state.chol->sample(rng);
    const auto target = [&](const Eigen::VectorXd& f) {
        return likelihood.log_density(f, state.mu_f, state.sigma_eps);
    };
    EssResult result = ess_step(state.f, prior_draw, target, state.log_lik, rng);
    state.f = std::move(result.state);
    state.log_lik = result.log_lik;
    return result.n_evals;
}

int update_kappa(ChainState& state, const Likelihood& likelihood, const Grid& grid,
                 const HyperBounds& bounds, const SamplerConfig& config, Rng& rng) {
    const Eigen::Index n = state.f.size();

    // Surrogate observation of the field under the current kernel scale.
    const double s_cur = config.surrogate_noise_scale * state.kappa.sigma_f * state.kappa.sigma_f;
    Eigen::VectorXd g(n);
    const double noise_sd = std::sqrt(s_cur);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = state.f[i] + noise_sd * rng.normal();

    // Whitened residual of f in its conditional given g; held fixed while the
    // hyperparameters move so that f deforms smoothly with the kernel.
    const KroneckerEigen eigen_cur(grid, state.kappa);
    const Eigen::VectorXd w_g_cur = eigen_cur.to_eigen_basis(g);
    const Eigen::ArrayXd lam_cur = eigen_cur.eigenvalues().array();
    const Eigen::VectorXd mean_cur =
        eigen_cur.from_eigen_basis((lam_cur / (lam_cur + s_cur) * w_g_cur.array()).matrix());
    const Eigen::ArrayXd cond_var_cur = lam_cur * s_cur / (lam_cur + s_cur);
    const Eigen::VectorXd eta =
        (eigen_cur.to_eigen_basis(state.f - mean_cur).array() / cond_var_cur.sqrt())
            .matrix();

    Eigen::VectorXd last_f;
    double last_lik = 0.0;
    const auto slice_target = [&](const Eigen::VectorXd& z) {
        const GPHyperparams kappa = constrain_kappa(z, bounds);
        const double s = config.surrogate_noise_scale * kappa.sigma_f * kappa.sigma_f;
        const KroneckerEigen eigen(grid, kappa);
        const Eigen::VectorXd w_g = eigen.to_eigen_basis(g);
        const Eigen::ArrayXd lam = eigen.eigenvalues().array();
        const Eigen::VectorXd mean =
            eigen.from_eigen_basis((lam / (lam + s) * w_g.array()).matrix());
        const Eigen::ArrayXd cond_sd = (lam * s / (lam + s)).sqrt();
        last_f = mean + eigen.from_eigen_basis((cond_sd * eta.array()).matrix());
        last_lik = likelihood.log_density(last_f, state.mu_f, state.sigma_eps);
        return last_lik + log_marginal_eigen(w_g, lam.matrix(), s);
    };

    const double current_target =
        state.log_lik + log_marginal_eigen(w_g_cur, lam_cur.matrix(), s_cur);
    Eigen::VectorXd prior_draw(3);
    for (int i = 0; i < 3; ++i) prior_draw[i] = rng.normal();

    EssResult result =
        ess_step(state.z_kappa, prior_draw, slice_target, current_target, rng);

    state.z_kappa = result.state;
    state.kappa = constrain_kappa(state.z_kappa, bounds);
    state.chol = std::make_shared<KroneckerCholesky>(grid, state.kappa);
    state.f = std::move(last_f);
    state.log_lik = last_lik;
    return result.n_evals;
}

int update_noise_mean(ChainState& state, const Likelihood& likelihood,
                      const HyperBounds& bounds, Rng& rng) {
    const auto slice_target = [&](const Eigen::VectorXd& z) {
        const double sigma_eps = constrain(z[0], 0.0, bounds.sigma_eps_max);
        const double mu_f = constrain(z[1], bounds.mu_f_lo, bounds.mu_f_hi);
        return likelihood.log_density(state.f, mu_f, sigma_eps);
    };
    Eigen::VectorXd prior_draw(2);
    prior_draw[0] = rng.normal();
    prior_draw[1] = rng.normal();

    EssResult result =
        ess_step(state.z_noise_mean, prior_draw, slice_target, state.log_lik, rng);

    state.z_noise_mean = result.state;
    state.sigma_eps = constrain(state.z_noise_mean[0], 0.0, bounds.sigma_eps_max);
    state.mu_f = constrain(state.z_noise_mean[1], bounds.mu_f_lo, bounds.mu_f_hi);
    state.log_lik = result.log_lik;
    return result.n_evals;
}

double log_posterior(const ChainState& state, const HyperBounds& bounds) {
    return state.log_lik + state.chol->logpdf(state.f) +
           log_hyperprior_density(state.kappa.sigma_f, 0.0, bounds.sigma_f_max) +
           log_hyperprior_density(state.kappa.ell_T, 0.0, bounds.ell_T_max) +
           log_hyperprior_density(state.kappa.ell_K, 0.0, bounds.ell_K_max) +
           log_hyperprior_density(state.sigma_eps, 0.0, bounds.sigma_eps_max) +
           log_hyperprior_density(state.mu_f, bounds.mu_f_lo, bounds.mu_f_hi);
}

Chain run_chain(const SamplerConfig& config, const Likelihood& likelihood,
                const Grid& grid, const HyperBounds& bounds) {
    config.validate();
    bounds.validate();

    Rng rng(config.seed);
    ChainState state = init_state(grid, bounds, config, likelihood);

    Chain chain;
    chain.config = config;
    chain.bounds = bounds;
    chain.grid = grid;
    chain.samples.reserve((config.n_iterations - config.burn_in + config.thin - 1) /
                          config.thin);

    double evals_f = 0.0;
    double evals_kappa = 0.0;
    double evals_noise_mean = 0.0;

    for (std::size_t t = 0; t < config.n_iterations; ++t) {
        evals_f += update_f(state, likelihood, rng);
        evals_kappa += update_kappa(state, likelihood, grid, bounds, config, rng);
        evals_noise_mean += update_noise_mean(state, likelihood, bounds, rng);

        if (t >= config.burn_in && (t - config.burn_in) % config.thin == 0) {
            Sample sample;
            sample.f = state.f;
            sample.kappa = state.kappa;
            sample.sigma_eps = state.sigma_eps;
            sample.mu_f = state.mu_f;
            sample.log_posterior = log_posterior(state, bounds);
            chain.samples.push_back(std::move(sample));
        }
    }

    const double n = static_cast<double>(config.n_iterations);
    chain.diagnostics.mean_evals_f = evals_f / n;
    chain.diagnostics.mean_evals_kappa = evals_kappa / n;
    chain.diagnostics.mean_evals_noise_mean = evals_noise_mean / n;
    return chain;
}

} // namespace volcal
