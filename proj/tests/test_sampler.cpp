#include "volcal/sampler.hpp"

#include "volcal/errors.hpp"
#include "volcal/gp_prior.hpp"
#include "volcal/grid.hpp"
#include "volcal/hyperprior.hpp"
#include "volcal/likelihood.hpp"
#include "volcal/rng.hpp"

#include <doctest.h>

#include <Eigen/Core>

#include <cmath>
#include <limits>

using volcal::Chain;
using volcal::ChainState;
using volcal::ConstantLikelihood;
using volcal::EssResult;
using volcal::GaussianFieldLikelihood;
using volcal::Grid;
using volcal::HyperBounds;
using volcal::KroneckerCholesky;
using volcal::Rng;
using volcal::SamplerConfig;
using volcal::constrain;
using volcal::ess_step;
using volcal::init_state;
using volcal::log_hyperprior_density;
using volcal::log_posterior;
using volcal::numerical_error;
using volcal::run_chain;
using volcal::update_f;
using volcal::update_kappa;
using volcal::update_noise_mean;
using volcal::validation_error;

namespace {

Grid small_grid() { return Grid({0.25, 1.0}, {80.0, 100.0, 120.0}); }

GaussianFieldLikelihood small_likelihood() {
    Eigen::VectorXd y(6);
    y << 0.12, -0.05, 0.2, 0.0, -0.15, 0.08;
    return GaussianFieldLikelihood(y, 0.25);
}

} // namespace

TEST_SUITE("sampler") {

TEST_CASE("config validation") {
    CHECK_NOTHROW(SamplerConfig{}.validate());
    SamplerConfig c;
    c.n_iterations = 0;
    CHECK_THROWS_AS(c.validate(), validation_error);
    c = {};
    c.burn_in = c.n_iterations;
    CHECK_THROWS_AS(c.validate(), validation_error);
    c = {};
    c.thin = 0;
    CHECK_THROWS_AS(c.validate(), validation_error);
    c = {};
    c.surrogate_noise_scale = 0.0;
    CHECK_THROWS_AS(c.validate(), validation_error);
    c.surrogate_noise_scale = 1.5;
    CHECK_THROWS_AS(c.validate(), validation_error);
    c.surrogate_noise_scale = 1.0;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("slice step accepts a flat likelihood immediately") {
    Rng rng(11);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    const auto flat = [](const Eigen::VectorXd&) { return 0.0; };
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd prior(2);
        prior << rng.normal(), rng.normal();
        const EssResult res = ess_step(x, prior, flat, 0.0, rng);
        CHECK(res.n_evals == 1);
        CHECK(res.log_lik == 0.0);
        // The move stays on the ellipse through the current point and draw.
        CHECK(res.state.size() == 2);
    }
}

TEST_CASE("slice chain recovers the conjugate gaussian posterior") {
    // Prior N(0, I), likelihood N(y | x, tau^2 I): the posterior is
    // N(y / (1 + tau^2), tau^2 / (1 + tau^2) I) per coordinate.
    const double tau2 = 0.25;
    Eigen::VectorXd y(2);
    y << 0.8, -1.2;
    const auto log_lik = [&](const Eigen::VectorXd& x) {
        return -0.5 * (x - y).squaredNorm() / tau2;
    };

    Rng rng(1234);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    double ll = log_lik(x);
    const int n = 20000;
    const int burn = 200;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Vector2d second = Eigen::Vector2d::Zero();
    for (int t = 0; t < n + burn; ++t) {
        Eigen::VectorXd prior(2);
        prior << rng.normal(), rng.normal();
        EssResult res = ess_step(x, prior, log_lik, ll, rng);
        CHECK(res.n_evals >= 1);
        x = std::move(res.state);
        ll = res.log_lik;
        if (t >= burn) {
            mean += x;
            second += x.cwiseProduct(x);
        }
    }
    mean /= n;
    second /= n;
    const Eigen::Vector2d var = second - mean.cwiseProduct(mean);

    const Eigen::Vector2d post_mean = y / (1.0 + tau2);
    const double post_var = tau2 / (1.0 + tau2);
    for (int d = 0; d < 2; ++d) {
        CHECK(std::abs(mean[d] - post_mean[d]) <= 0.035);
        CHECK(std::abs(var[d] - post_var) <= 0.025);
    }
}

TEST_CASE("slice step rejects NaN proposals and aborts on a NaN state") {
    Rng rng(77);
    const auto half_space = [](const Eigen::VectorXd& x) {
        if (x[0] > 0.5) return std::numeric_limits<double>::quiet_NaN();
        return -0.5 * x.squaredNorm();
    };
    Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    double ll = half_space(x);
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd prior(1);
        prior << rng.normal();
        EssResult res = ess_step(x, prior, half_space, ll, rng);
        x = std::move(res.state);
        ll = res.log_lik;
        CHECK(x[0] <= 0.5);
        CHECK(std::isfinite(ll));
    }

    const auto fine = [](const Eigen::VectorXd&) { return -1.0; };
    CHECK_THROWS_AS((void)ess_step(x, x, fine,
                                   std::numeric_limits<double>::quiet_NaN(), rng),
                    numerical_error);
    CHECK_THROWS_AS((void)ess_step(x, Eigen::VectorXd::Zero(3), fine, -1.0, rng),
                    validation_error);
}

TEST_CASE("initial state sits at the box midpoints with coherent caches") {
    const Grid grid = small_grid();
    const HyperBounds bounds;
    const SamplerConfig config;
    const GaussianFieldLikelihood like = small_likelihood();
    const ChainState state = init_state(grid, bounds, config, like);

    CHECK(state.f.size() == 6);
    CHECK(state.f.cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.z_kappa.cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.z_noise_mean.cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.kappa.sigma_f == 0.5 * bounds.sigma_f_max);
    CHECK(state.kappa.ell_T == 0.5 * bounds.ell_T_max);
    CHECK(state.kappa.ell_K == 0.5 * bounds.ell_K_max);
    CHECK(state.sigma_eps == 0.5 * bounds.sigma_eps_max);
    CHECK(state.mu_f ==
          doctest::Approx(0.5 * (bounds.mu_f_lo + bounds.mu_f_hi)).epsilon(1e-14));
    REQUIRE(state.chol != nullptr);
    CHECK(state.chol->rows() == 2);
    CHECK(state.chol->cols() == 3);
    CHECK(state.log_lik ==
          like.log_density(state.f, state.mu_f, state.sigma_eps));

    SamplerConfig bad;
    bad.thin = 0;
    CHECK_THROWS_AS((void)init_state(grid, bounds, bad, like), validation_error);
}

TEST_CASE("each block leaves the shared caches coherent") {
    const Grid grid = small_grid();
    const HyperBounds bounds;
    SamplerConfig config;
    config.seed = 5;
    const GaussianFieldLikelihood like = small_likelihood();
    ChainState state = init_state(grid, bounds, config, like);
    Rng rng(909);

    for (int round = 0; round < 5; ++round) {
        const int evals_f = update_f(state, like, rng);
        CHECK(evals_f >= 1);
        CHECK(state.log_lik ==
              doctest::Approx(like.log_density(state.f, state.mu_f, state.sigma_eps))
                  .epsilon(1e-12));

        const int evals_kappa = update_kappa(state, like, grid, bounds, config, rng);
        CHECK(evals_kappa >= 1);
        CHECK(state.kappa.sigma_f == constrain(state.z_kappa[0], 0.0, bounds.sigma_f_max));
        CHECK(state.kappa.ell_T == constrain(state.z_kappa[1], 0.0, bounds.ell_T_max));
        CHECK(state.kappa.ell_K == constrain(state.z_kappa[2], 0.0, bounds.ell_K_max));
        CHECK(state.log_lik ==
              doctest::Approx(like.log_density(state.f, state.mu_f, state.sigma_eps))
                  .epsilon(1e-12));
        // The kernel cache tracks the accepted hyperparameters.
        REQUIRE(state.chol != nullptr);
        const KroneckerCholesky fresh(grid, state.kappa);
        CHECK((state.chol->chol_T() - fresh.chol_T()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((state.chol->chol_K() - fresh.chol_K()).cwiseAbs().maxCoeff() == 0.0);

        const int evals_noise = update_noise_mean(state, like, bounds, rng);
        CHECK(evals_noise >= 1);
        CHECK(state.sigma_eps == constrain(state.z_noise_mean[0], 0.0, bounds.sigma_eps_max));
        CHECK(state.mu_f ==
              constrain(state.z_noise_mean[1], bounds.mu_f_lo, bounds.mu_f_hi));
        CHECK(state.log_lik ==
              doctest::Approx(like.log_density(state.f, state.mu_f, state.sigma_eps))
                  .epsilon(1e-12));
    }
}

TEST_CASE("stored log posterior decomposes into its terms") {
    const Grid grid = small_grid();
    const HyperBounds bounds;
    SamplerConfig config;
    config.n_iterations = 30;
    config.burn_in = 10;
    config.thin = 5;
    config.seed = 42;
    const GaussianFieldLikelihood like = small_likelihood();
    const Chain chain = run_chain(config, like, grid, bounds);
    REQUIRE(chain.samples.size() == 4);

    for (const auto& sample : chain.samples) {
        const KroneckerCholesky chol(grid, sample.kappa);
        const double expected =
            like.log_density(sample.f, sample.mu_f, sample.sigma_eps) +
            chol.logpdf(sample.f) +
            log_hyperprior_density(sample.kappa.sigma_f, 0.0, bounds.sigma_f_max) +
            log_hyperprior_density(sample.kappa.ell_T, 0.0, bounds.ell_T_max) +
            log_hyperprior_density(sample.kappa.ell_K, 0.0, bounds.ell_K_max) +
            log_hyperprior_density(sample.sigma_eps, 0.0, bounds.sigma_eps_max) +
            log_hyperprior_density(sample.mu_f, bounds.mu_f_lo, bounds.mu_f_hi);
        CHECK(sample.log_posterior == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("chains are deterministic in the seed and count samples exactly") {
    const Grid grid = small_grid();
    const GaussianFieldLikelihood like = small_likelihood();
    SamplerConfig config;
    config.n_iterations = 20;
    config.burn_in = 5;
    config.thin = 4;
    config.seed = 321;

    const Chain a = run_chain(config, like, grid);
    const Chain b = run_chain(config, like, grid);
    // Stored at t = 5, 9, 13, 17.
    REQUIRE(a.samples.size() == 4);
    REQUIRE(b.samples.size() == 4);
    for (std::size_t s = 0; s < a.samples.size(); ++s) {
        CHECK((a.samples[s].f - b.samples[s].f).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.samples[s].kappa.sigma_f == b.samples[s].kappa.sigma_f);
        CHECK(a.samples[s].kappa.ell_T == b.samples[s].kappa.ell_T);
        CHECK(a.samples[s].kappa.ell_K == b.samples[s].kappa.ell_K);
        CHECK(a.samples[s].sigma_eps == b.samples[s].sigma_eps);
        CHECK(a.samples[s].mu_f == b.samples[s].mu_f);
        CHECK(a.samples[s].log_posterior == b.samples[s].log_posterior);
    }
    CHECK(a.diagnostics.mean_evals_f == b.diagnostics.mean_evals_f);
    CHECK(a.diagnostics.mean_evals_f >= 1.0);
    CHECK(a.diagnostics.mean_evals_kappa >= 1.0);
    CHECK(a.diagnostics.mean_evals_noise_mean >= 1.0);

    config.seed = 322;
    const Chain c = run_chain(config, like, grid);
    CHECK((a.samples[0].f - c.samples[0].f).cwiseAbs().maxCoeff() > 0.0);

    config.n_iterations = 100;
    config.burn_in = 10;
    config.thin = 7;
    CHECK(run_chain(config, like, grid).samples.size() == 13);
}

TEST_CASE("a flat likelihood leaves the chain exploring the prior box") {
    const Grid grid({0.5, 1.0}, {90.0, 110.0});
    const ConstantLikelihood flat;
    SamplerConfig config;
    config.n_iterations = 200;
    config.burn_in = 20;
    config.thin = 3;
    config.seed = 9;
    const HyperBounds bounds;
    const Chain chain = run_chain(config, flat, grid, bounds);

    double min_sf = 1e300;
    double max_sf = -1e300;
    for (const auto& sample : chain.samples) {
        CHECK(sample.kappa.sigma_f > 0.0);
        CHECK(sample.kappa.sigma_f < bounds.sigma_f_max);
        CHECK(sample.sigma_eps > 0.0);
        CHECK(sample.sigma_eps < bounds.sigma_eps_max);
        CHECK(sample.mu_f > bounds.mu_f_lo);
        CHECK(sample.mu_f < bounds.mu_f_hi);
        min_sf = std::min(min_sf, sample.kappa.sigma_f);
        max_sf = std::max(max_sf, sample.kappa.sigma_f);
    }
    // The hyperparameters actually move.
    CHECK(max_sf - min_sf > 0.05);
}

} // TEST_SUITE
