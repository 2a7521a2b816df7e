#pragma once

#include "volcal/gp_prior.hpp"
#include "volcal/grid.hpp"
#include "volcal/hyperprior.hpp"
#include "volcal/likelihood.hpp"
#include "volcal/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace volcal {

struct SamplerConfig {
    std::size_t n_iterations = 6000;
    std::size_t burn_in = 1000;
    std::size_t thin = 40;
    std::uint64_t seed = 0;
    // Relative variance of the auxiliary surrogate observation in the
    // hyperparameter block: S = scale * sigma_f^2 * I.
    double surrogate_noise_scale = 0.1;

    void validate() const;
};

// One elliptical slice sampling step for a target with N(0, identity-like)
// prior factored out: prior_draw must come from the prior of `current`.
// NaN proposals are treated as log-likelihood -inf and rejected; a NaN
// current likelihood aborts with numerical_error.
struct EssResult {
    Eigen::VectorXd state;
    double log_lik = 0.0;
    int n_evals = 0;
};

EssResult ess_step(const Eigen::VectorXd& current, const Eigen::VectorXd& prior_draw,
                   const std::function<double(const Eigen::VectorXd&)>& log_lik,
                   double current_log_lik, Rng& rng);

// Markov state plus the caches the blocks share: the Cholesky of the current
// kernel and the likelihood at the current point. Blocks keep both coherent.
struct ChainState {
    Eigen::VectorXd f;
    Eigen::Vector3d z_kappa = Eigen::Vector3d::Zero();
    Eigen::Vector2d z_noise_mean = Eigen::Vector2d::Zero();
    GPHyperparams kappa;
    double sigma_eps = 0.0;
    double mu_f = 0.0;
    std::shared_ptr<const KroneckerCholesky> chol;
    double log_lik = 0.0;
};

struct Sample {
    Eigen::VectorXd f;
    GPHyperparams kappa;
    double sigma_eps = 0.0;
    double mu_f = 0.0;
    double log_posterior = 0.0;
};

struct ChainDiagnostics {
    double mean_evals_f = 0.0;
    double mean_evals_kappa = 0.0;
    double mean_evals_noise_mean = 0.0;
};

struct Chain {
    SamplerConfig config;
    HyperBounds bounds;
    Grid grid;
    std::vector<Sample> samples;
    ChainDiagnostics diagnostics;
};

// z = 0 in every unconstrained coordinate, f = 0, caches populated.
ChainState init_state(const Grid& grid, const HyperBounds& bounds,
                      const SamplerConfig& config, const Likelihood& likelihood);

// Field block: ESS on f under the current kernel. Returns likelihood evals.
int update_f(ChainState& state, const Likelihood& likelihood, Rng& rng);

// Kernel block: surrogate-data slice move on (sigma_f, ell_T, ell_K). A noisy
// copy g = f + N(0, S) makes the conditional of f under any kernel Gaussian;
// f is re-expressed through its whitened residual in that conditional and
// moved together with the hyperparameters, with the marginal N(g; 0,
// Sigma + S) entering the slice target.
int update_kappa(ChainState& state, const Likelihood& likelihood, const Grid& grid,
                 const HyperBounds& bounds, const SamplerConfig& config, Rng& rng);

// Noise/mean block: ESS on unconstrained (sigma_eps, mu_f); the hyperprior
// is the z-space standard normal, so the slice target is the likelihood.
int update_noise_mean(ChainState& state, const Likelihood& likelihood,
                      const HyperBounds& bounds, Rng& rng);

// Stored log posterior of a state: likelihood + GP prior of f + the five
// constrained-space hyperprior densities.
double log_posterior(const ChainState& state, const HyperBounds& bounds);

// Runs update_f, update_kappa, update_noise_mean per iteration; records
// every thin-th state after burn_in. Deterministic in config.seed.
Chain run_chain(const SamplerConfig& config, const Likelihood& likelihood,
                const Grid& grid, const HyperBounds& bounds = {});

} // namespace volcal
