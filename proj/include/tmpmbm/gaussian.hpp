#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>

namespace tmpmbm {

/// Raised when a covariance (prior or innovation) is not positive definite.
class SingularCovarianceError : public std::runtime_error {
public:
    explicit SingularCovarianceError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on inconsistent vector/matrix dimensions.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Multivariate Gaussian N(mean, cov).
struct Gaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    Gaussian() = default;
    Gaussian(Eigen::VectorXd m, Eigen::MatrixXd p) : mean(std::move(m)), cov(std::move(p)) {}

    [[nodiscard]] Eigen::Index dim() const { return mean.size(); }
};

/// Linear observation z = H x + v, v ~ N(0, R).
struct LinearObservation {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd noise_cov;
};

/// Result of a Kalman update: posterior and log of the marginal likelihood N(z; H m, S).
struct KalmanResult {
    Gaussian posterior;
    double log_likelihood = 0.0;

    [[nodiscard]] double likelihood() const;
};

/// Predicted measurement statistics (H m, H P H^T + R).
struct Innovation {
    Eigen::VectorXd predicted;
    Eigen::MatrixXd cov;
};

[[nodiscard]] double gaussian_log_eval(const Eigen::VectorXd& x, const Gaussian& g);
[[nodiscard]] double gaussian_eval(const Eigen::VectorXd& x, const Gaussian& g);

[[nodiscard]] Innovation innovation(const Gaussian& prior, const LinearObservation& obs);

/// Conditions `prior` on z. The posterior covariance is symmetrised.
[[nodiscard]] KalmanResult kalman_update(const Gaussian& prior, const LinearObservation& obs,
                                         const Eigen::VectorXd& z);

/// Joint density of (x_k, x_{k+1}) with x_{k+1} = F x_k + w, w ~ N(0, Q).
[[nodiscard]] Gaussian predict_two_step(const Gaussian& prior, const Eigen::MatrixXd& F,
                                        const Eigen::MatrixXd& Q);

/// Marginal over the contiguous index range [start, start + size).
[[nodiscard]] Gaussian marginal_block(const Gaussian& g, Eigen::Index start, Eigen::Index size);

/// Single Gaussian with the first two moments of the weighted mixture. Weights need not be
/// normalised but must have a positive sum.
[[nodiscard]] Gaussian moment_match(std::span<const double> weights,
                                    std::span<const Gaussian> components);

/// (P + P^T) / 2
[[nodiscard]] Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& p);

}  // namespace tmpmbm
