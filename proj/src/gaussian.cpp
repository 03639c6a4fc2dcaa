#include "tmpmbm/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace tmpmbm {

namespace {

constexpr double kCholeskyTolerance = 1e-12;

// Cholesky factor of a symmetric matrix; throws when it is not positive definite.
Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": matrix is not square");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(m));
    if (llt.info() != Eigen::Success) {
        throw SingularCovarianceError(std::string(what) + ": not positive definite");
    }
    const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    const Eigen::VectorXd d = llt.matrixLLT().diagonal();
    if ((d.array() * d.array()).minCoeff() <= kCholeskyTolerance * scale) {
        throw SingularCovarianceError(std::string(what) + ": numerically singular");
    }
    return llt;
}

double log_normal_from_cholesky(const Eigen::VectorXd& residual,
                                const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const Eigen::VectorXd whitened = llt.matrixL().solve(residual);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const auto n = static_cast<double>(residual.size());
    return -0.5 * (whitened.squaredNorm() + log_det + n * std::log(2.0 * std::numbers::pi));
}

}  // namespace

double KalmanResult::likelihood() const { return std::exp(log_likelihood); }

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& p) { return 0.5 * (p + p.transpose()); }

double gaussian_log_eval(const Eigen::VectorXd& x, const Gaussian& g) {
    if (x.size() != g.mean.size() || g.cov.rows() != g.mean.size()) {
        throw DimensionError("gaussian_eval: dimension mismatch");
    }
    const auto llt = checked_cholesky(g.cov, "gaussian_eval");
    return log_normal_from_cholesky(x - g.mean, llt);
}

double gaussian_eval(const Eigen::VectorXd& x, const Gaussian& g) {
    return std::exp(gaussian_log_eval(x, g));
}

Innovation innovation(const Gaussian& prior, const LinearObservation& obs) {
    if (obs.matrix.cols() != prior.mean.size() || obs.noise_cov.rows() != obs.matrix.rows()) {
        throw DimensionError("innovation: observation does not match state dimension");
    }
    return {obs.matrix * prior.mean,
            symmetrize(obs.matrix * prior.cov * obs.matrix.transpose() + obs.noise_cov)};
}

KalmanResult kalman_update(const Gaussian& prior, const LinearObservation& obs,
                           const Eigen::VectorXd& z) {
    const Innovation inn = innovation(prior, obs);
    if (z.size() != inn.predicted.size()) {
        throw DimensionError("kalman_update: measurement dimension mismatch");
    }
    const auto llt = checked_cholesky(inn.cov, "kalman_update innovation");
    const Eigen::VectorXd residual = z - inn.predicted;
    const Eigen::MatrixXd pht = prior.cov * obs.matrix.transpose();
    // K = P H^T S^-1, computed as (S^-1 H P)^T.
    const Eigen::MatrixXd gain = llt.solve(pht.transpose()).transpose();

    KalmanResult out;
    out.posterior.mean = prior.mean + gain * residual;
    out.posterior.cov = symmetrize(prior.cov - gain * pht.transpose());
    out.log_likelihood = log_normal_from_cholesky(residual, llt);
    return out;
}

Gaussian predict_two_step(const Gaussian& prior, const Eigen::MatrixXd& F,
                          const Eigen::MatrixXd& Q) {
    const Eigen::Index n = prior.mean.size();
    if (F.rows() != n || F.cols() != n || Q.rows() != n || Q.cols() != n ||
        prior.cov.rows() != n) {
        throw DimensionError("predict_two_step: F, Q and the prior must share the state dimension");
    }
    Gaussian out;
    out.mean.resize(2 * n);
    out.mean << prior.mean, F * prior.mean;
    const Eigen::MatrixXd pft = prior.cov * F.transpose();
    out.cov.resize(2 * n, 2 * n);
    out.cov.topLeftCorner(n, n) = prior.cov;
    out.cov.topRightCorner(n, n) = pft;
    out.cov.bottomLeftCorner(n, n) = pft.transpose();
    out.cov.bottomRightCorner(n, n) = symmetrize(F * pft + Q);
    return out;
}

Gaussian marginal_block(const Gaussian& g, Eigen::Index start, Eigen::Index size) {
    if (start < 0 || size < 0 || start + size > g.mean.size()) {
        throw DimensionError("marginal_block: block out of range");
    }
    return {g.mean.segment(start, size), g.cov.block(start, start, size, size)};
}

Gaussian moment_match(std::span<const double> weights, std::span<const Gaussian> components) {
    if (weights.size() != components.size() || components.empty()) {
        throw DimensionError("moment_match: weights and components must be non-empty and aligned");
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) {
        throw std::invalid_argument("moment_match: weights must have a positive sum");
    }
    const Eigen::Index n = components.front().mean.size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < components.size(); ++i) {
        mean += (weights[i] / total) * components[i].mean;
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < components.size(); ++i) {
        const Eigen::VectorXd d = components[i].mean - mean;
        cov += (weights[i] / total) * (components[i].cov + d * d.transpose());
    }
    return {std::move(mean), symmetrize(cov)};
}

}  // namespace tmpmbm
