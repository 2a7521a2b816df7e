#pragma once

#include "volcal/grid.hpp"
#include "volcal/rng.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace volcal {

// Squared-exponential kernel hyperparameters. Lengthscales act on the unit
// square the grid is scaled onto; the signal variance sigma_f^2 is carried
// entirely by the maturity factor so the Kronecker product applies it once.
struct GPHyperparams {
    double sigma_f = 0.3;
    double ell_T = 0.5;
    double ell_K = 0.5;

    void validate() const;
};

// Dense SE kernel matrix over 1-d coordinates:
// k(a, b) = variance * exp(-(a - b)^2 / (2 ell^2)).
Eigen::MatrixXd se_kernel_matrix(const std::vector<double>& coords, double ell,
                                 double variance);

// Lower Cholesky factor with the same escalating relative jitter policy the
// Kronecker factorization uses (1e-8 up to 1e-4 in decades, then error).
Eigen::MatrixXd jittered_dense_cholesky(const Eigen::MatrixXd& cov);

// Cholesky factors of a Kronecker covariance Sigma = Sigma_T (x) Sigma_K over
// maturity-major flattened surfaces. Factorization adds an escalating
// relative jitter (1e-8 up to 1e-4 in decades) to each factor's diagonal and
// throws numerical_error beyond that.
class KroneckerCholesky {
public:
    KroneckerCholesky(const Eigen::MatrixXd& cov_T, const Eigen::MatrixXd& cov_K);

    // Factors from the hyperparameters on the grid's unit square.
    KroneckerCholesky(const Grid& grid, const GPHyperparams& kappa);

    std::size_t rows() const { return static_cast<std::size_t>(chol_T_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(chol_K_.rows()); }
    std::size_t size() const { return rows() * cols(); }

    const Eigen::MatrixXd& chol_T() const { return chol_T_; }
    const Eigen::MatrixXd& chol_K() const { return chol_K_; }
    double jitter_used() const { return jitter_used_; }

    // Draw f ~ N(0, Sigma) as vec(L_K H L_T^T) with H iid standard normal;
    // column-major vec of the (strike x maturity) matrix is exactly the
    // maturity-major flattening.
    Eigen::VectorXd sample(Rng& rng) const;
    Eigen::VectorXd sample(const Eigen::MatrixXd& white) const;

    // eta = (L_T (x) L_K)^{-1} f, so |eta|^2 is the Mahalanobis norm.
    Eigen::VectorXd whiten(const Eigen::VectorXd& f) const;

    // Sigma^{-1} v through two pairs of triangular solves, O(N (I + J)).
    Eigen::VectorXd solve(const Eigen::VectorXd& v) const;

    // log N(f; 0, Sigma).
    double logpdf(const Eigen::VectorXd& f) const;

private:
    Eigen::MatrixXd chol_T_;
    Eigen::MatrixXd chol_K_;
    double jitter_used_ = 0.0;
};

// Eigendecomposition of the same Kronecker covariance; the surrogate-data
// sampler needs Sigma as Q diag(lambda) Q^T to combine it with spherical
// noise analytically. Factor eigenvalues are floored at a tiny multiple of
// their largest to absorb roundoff.
class KroneckerEigen {
public:
    KroneckerEigen(const Eigen::MatrixXd& cov_T, const Eigen::MatrixXd& cov_K);
    KroneckerEigen(const Grid& grid, const GPHyperparams& kappa);

    std::size_t rows() const { return static_cast<std::size_t>(q_T_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(q_K_.rows()); }
    std::size_t size() const { return rows() * cols(); }

    // Joint eigenvalues, maturity-major: lambda[i * J + j] = lam_T[i] * lam_K[j].
    const Eigen::VectorXd& eigenvalues() const { return lambda_; }

    // w = (Q_T (x) Q_K)^T v and its inverse.
    Eigen::VectorXd to_eigen_basis(const Eigen::VectorXd& v) const;
    Eigen::VectorXd from_eigen_basis(const Eigen::VectorXd& w) const;

private:
    Eigen::MatrixXd q_T_;
    Eigen::MatrixXd q_K_;
    Eigen::VectorXd lambda_;
};

struct PredictiveDensity {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

// Exact GP conditional of the surface at new (T, K) points given the
// noise-free node values f. New points pass through the grid's unit-square
// map, so they may extrapolate beyond [0, 1]. O(N (I + J) M + N M^2).
PredictiveDensity conditional_predictive(const KroneckerCholesky& chol, const Grid& grid,
                                         const GPHyperparams& kappa,
                                         const Eigen::VectorXd& f,
                                         const std::vector<std::pair<double, double>>& new_points);

} // namespace volcal
