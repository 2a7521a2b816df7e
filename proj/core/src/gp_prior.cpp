#include "volcal/gp_prior.hpp"

#include "volcal/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace volcal {

namespace {

// Cholesky with escalating relative jitter on the diagonal. The floor keeps
// the jitter meaningful for near-zero conditional covariances.
Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov, double& jitter_out) {
    const double scale = std::max(cov.diagonal().mean(), 1e-12);
    double jitter = 1e-8;
    while (jitter <= 1e-4 + 1e-12) {
        Eigen::MatrixXd work = cov;
        work.diagonal().array() += jitter * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) {
            jitter_out = std::max(jitter_out, jitter);
            return llt.matrixL();
        }
        jitter *= 10.0;
    }
    throw numerical_error("kronecker cholesky: factor not positive definite at jitter 1e-4");
}

std::vector<double> unit_maturities(const Grid& grid) {
    std::vector<double> out(grid.n_maturities());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = grid.unit_maturity(grid.maturity(i));
    return out;
}

std::vector<double> unit_strikes(const Grid& grid) {
    std::vector<double> out(grid.n_strikes());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = grid.unit_strike(grid.strike(j));
    return out;
}

// f(N) viewed as the (strike x maturity) matrix whose column-major vec it is.
Eigen::Map<const Eigen::MatrixXd> as_matrix(const Eigen::VectorXd& f, std::size_t rows_T,
                                            std::size_t cols_K) {
    return Eigen::Map<const Eigen::MatrixXd>(f.data(), static_cast<Eigen::Index>(cols_K),
                                             static_cast<Eigen::Index>(rows_T));
}

} // namespace

void GPHyperparams::validate() const {
    if (!(sigma_f > 0.0) || !(ell_T > 0.0) || !(ell_K > 0.0))
        throw validation_error("gp hyperparams: sigma_f, ell_T, ell_K must be positive");
}

Eigen::MatrixXd se_kernel_matrix(const std::vector<double>& coords, double ell,
                                 double variance) {
    if (!(ell > 0.0) || !(variance > 0.0))
        throw validation_error("se_kernel_matrix: ell and variance must be positive");
    const Eigen::Index n = static_cast<Eigen::Index>(coords.size());
    Eigen::MatrixXd cov(n, n);
    const double inv = 1.0 / (2.0 * ell * ell);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double d = coords[static_cast<std::size_t>(a)] -
                             coords[static_cast<std::size_t>(b)];
            const double k = variance * std::exp(-d * d * inv);
            cov(a, b) = k;
            cov(b, a) = k;
        }
    return cov;
}

Eigen::MatrixXd jittered_dense_cholesky(const Eigen::MatrixXd& cov) {
    double jitter = 0.0;
    return jittered_cholesky(cov, jitter);
}

KroneckerCholesky::KroneckerCholesky(const Eigen::MatrixXd& cov_T,
                                     const Eigen::MatrixXd& cov_K) {
    if (cov_T.rows() != cov_T.cols() || cov_K.rows() != cov_K.cols())
        throw validation_error("kronecker cholesky: factors must be square");
    chol_T_ = jittered_cholesky(cov_T, jitter_used_);
    chol_K_ = jittered_cholesky(cov_K, jitter_used_);
}

KroneckerCholesky::KroneckerCholesky(const Grid& grid, const GPHyperparams& kappa) {
    kappa.validate();
    const Eigen::MatrixXd cov_T =
        se_kernel_matrix(unit_maturities(grid), kappa.ell_T, kappa.sigma_f * kappa.sigma_f);
    const Eigen::MatrixXd cov_K = se_kernel_matrix(unit_strikes(grid), kappa.ell_K, 1.0);
    chol_T_ = jittered_cholesky(cov_T, jitter_used_);
    chol_K_ = jittered_cholesky(cov_K, jitter_used_);
}

Eigen::VectorXd KroneckerCholesky::sample(Rng& rng) const {
    Eigen::MatrixXd white(static_cast<Eigen::Index>(cols()), static_cast<Eigen::Index>(rows()));
    for (Eigen::Index i = 0; i < white.cols(); ++i)
        for (Eigen::Index j = 0; j < white.rows(); ++j) white(j, i) = rng.normal();
    return sample(white);
}

Eigen::VectorXd KroneckerCholesky::sample(const Eigen::MatrixXd& white) const {
    if (white.rows() != chol_K_.rows() || white.cols() != chol_T_.rows())
        throw validation_error("kronecker cholesky: white noise shape mismatch");
    const Eigen::MatrixXd field = chol_K_ * white * chol_T_.transpose();
    return Eigen::Map<const Eigen::VectorXd>(field.data(), field.size());
}

Eigen::VectorXd KroneckerCholesky::whiten(const Eigen::VectorXd& f) const {
    if (static_cast<std::size_t>(f.size()) != size())
        throw validation_error("kronecker cholesky: vector size mismatch");
    const auto field = as_matrix(f, rows(), cols());
    Eigen::MatrixXd work = chol_K_.triangularView<Eigen::Lower>().solve(field);
    Eigen::MatrixXd work_t = work.transpose();
    chol_T_.triangularView<Eigen::Lower>().solveInPlace(work_t);
    const Eigen::MatrixXd result = work_t.transpose();
    return Eigen::Map<const Eigen::VectorXd>(result.data(), result.size());
}

Eigen::VectorXd KroneckerCholesky::solve(const Eigen::VectorXd& v) const {
    if (static_cast<std::size_t>(v.size()) != size())
        throw validation_error("kronecker cholesky: vector size mismatch");
    const auto field = as_matrix(v, rows(), cols());
    Eigen::MatrixXd work = chol_K_.triangularView<Eigen::Lower>().solve(field);
    chol_K_.transpose().triangularView<Eigen::Upper>().solveInPlace(work);
    Eigen::MatrixXd work_t = work.transpose();
    chol_T_.triangularView<Eigen::Lower>().solveInPlace(work_t);
    chol_T_.transpose().triangularView<Eigen::Upper>().solveInPlace(work_t);
    const Eigen::MatrixXd result = work_t.transpose();
    return Eigen::Map<const Eigen::VectorXd>(result.data(), result.size());
}

double KroneckerCholesky::logpdf(const Eigen::VectorXd& f) const {
    const Eigen::VectorXd eta = whiten(f);
    const double rows_T = static_cast<double>(rows());
    const double cols_K = static_cast<double>(cols());
    const double half_logdet = cols_K * chol_T_.diagonal().array().log().sum() +
                               rows_T * chol_K_.diagonal().array().log().sum();
    return -0.5 * eta.squaredNorm() - half_logdet -
           0.5 * static_cast<double>(size()) * std::log(2.0 * std::numbers::pi);
}

KroneckerEigen::KroneckerEigen(const Eigen::MatrixXd& cov_T, const Eigen::MatrixXd& cov_K) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_T(cov_T);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_K(cov_K);
    if (es_T.info() != Eigen::Success || es_K.info() != Eigen::Success)
        throw numerical_error("kronecker eigen: factor decomposition failed");
    q_T_ = es_T.eigenvectors();
    q_K_ = es_K.eigenvectors();
    Eigen::VectorXd lam_T = es_T.eigenvalues();
    Eigen::VectorXd lam_K = es_K.eigenvalues();
    lam_T = lam_T.cwiseMax(1e-14 * lam_T.maxCoeff());
    lam_K = lam_K.cwiseMax(1e-14 * lam_K.maxCoeff());
    lambda_.resize(lam_T.size() * lam_K.size());
    for (Eigen::Index i = 0; i < lam_T.size(); ++i)
        for (Eigen::Index j = 0; j < lam_K.size(); ++j)
            lambda_[i * lam_K.size() + j] = lam_T[i] * lam_K[j];
}

KroneckerEigen::KroneckerEigen(const Grid& grid, const GPHyperparams& kappa)
    : KroneckerEigen(
          se_kernel_matrix(unit_maturities(grid), kappa.ell_T, kappa.sigma_f * kappa.sigma_f),
          se_kernel_matrix(unit_strikes(grid), kappa.ell_K, 1.0)) {}

Eigen::VectorXd KroneckerEigen::to_eigen_basis(const Eigen::VectorXd& v) const {
    if (static_cast<std::size_t>(v.size()) != size())
        throw validation_error("kronecker eigen: vector size mismatch");
    const auto field = as_matrix(v, rows(), cols());
    const Eigen::MatrixXd work = q_K_.transpose() * field * q_T_;
    return Eigen::Map<const Eigen::VectorXd>(work.data(), work.size());
}

Eigen::VectorXd KroneckerEigen::from_eigen_basis(const Eigen::VectorXd& w) const {
    if (static_cast<std::size_t>(w.size()) != size())
        throw validation_error("kronecker eigen: vector size mismatch");
    const auto field = as_matrix(w, rows(), cols());
    const Eigen::MatrixXd work = q_K_ * field * q_T_.transpose();
    return Eigen::Map<const Eigen::VectorXd>(work.data(), work.size());
}

PredictiveDensity conditional_predictive(
    const KroneckerCholesky& chol, const Grid& grid, const GPHyperparams& kappa,
    const Eigen::VectorXd& f, const std::vector<std::pair<double, double>>& new_points) {
    kappa.validate();
    if (static_cast<std::size_t>(f.size()) != grid.size())
        throw validation_error("conditional_predictive: f does not match grid");
    if (new_points.empty())
        throw validation_error("conditional_predictive: no prediction points");

    const std::size_t n = grid.size();
    const std::size_t m = new_points.size();
    const std::vector<double> u_T = unit_maturities(grid);
    const std::vector<double> u_K = unit_strikes(grid);
    const double var = kappa.sigma_f * kappa.sigma_f;
    const double inv_T = 1.0 / (2.0 * kappa.ell_T * kappa.ell_T);
    const double inv_K = 1.0 / (2.0 * kappa.ell_K * kappa.ell_K);

    std::vector<double> p_T(m), p_K(m);
    for (std::size_t q = 0; q < m; ++q) {
        p_T[q] = grid.unit_maturity(new_points[q].first);
        p_K[q] = grid.unit_strike(new_points[q].second);
    }

    // Cross covariance, one column per new point (outer product of the two
    // factor kernels keeps the build O(NM)).
    Eigen::MatrixXd cross(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t i = 0; i < u_T.size(); ++i) {
            const double dt = u_T[i] - p_T[q];
            const double k_t = var * std::exp(-dt * dt * inv_T);
            for (std::size_t j = 0; j < u_K.size(); ++j) {
                const double dk = u_K[j] - p_K[q];
                cross(static_cast<Eigen::Index>(i * u_K.size() + j),
                      static_cast<Eigen::Index>(q)) = k_t * std::exp(-dk * dk * inv_K);
            }
        }

    Eigen::MatrixXd solved(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t q = 0; q < m; ++q)
        solved.col(static_cast<Eigen::Index>(q)) =
            chol.solve(cross.col(static_cast<Eigen::Index>(q)));

    PredictiveDensity out;
    out.mean = cross.transpose() * chol.solve(f);
    Eigen::MatrixXd prior(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            const double dt = p_T[a] - p_T[b];
            const double dk = p_K[a] - p_K[b];
            prior(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                var * std::exp(-dt * dt * inv_T) * std::exp(-dk * dk * inv_K);
        }
    out.cov = prior - cross.transpose() * solved;
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    for (Eigen::Index q = 0; q < out.cov.rows(); ++q)
        if (out.cov(q, q) < 0.0) out.cov(q, q) = 0.0;
    return out;
}

} // namespace volcal
