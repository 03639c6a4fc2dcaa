#pragma once

#include "tmpmbm/assignment.hpp"
#include "tmpmbm/gaussian.hpp"
#include "tmpmbm/gospa.hpp"
#include "tmpmbm/models.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

/// Reference implementations that share no code path with the library routines they check.
namespace tmpmbm::oracle {

/// Every injective row -> column map with finite cost, ordered by (cost, columns).
[[nodiscard]] std::vector<Assignment> all_assignments(const CostMatrix& cost);

/// GOSPA (alpha = 2) by enumerating every partial matching of the smaller set.
[[nodiscard]] double gospa_brute_force(const std::vector<Eigen::VectorXd>& x,
                                       const std::vector<Eigen::VectorXd>& y, double c, double p);

/// Kalman filter on the stacked two-step state: joint prediction written out block by
/// block, update with a full measurement through an explicit inverse, then the window-end
/// block is kept. Returns the window-end posterior after each measurement.
[[nodiscard]] std::vector<Gaussian> stacked_kalman(const Gaussian& prior, const Eigen::MatrixXd& F,
                                                   const Eigen::MatrixXd& Q, const Eigen::MatrixXd& H,
                                                   const Eigen::MatrixXd& R,
                                                   const std::vector<Eigen::VectorXd>& z_first,
                                                   const std::vector<Eigen::VectorXd>& z_last);

/// Textbook predict/update Kalman filter on window-end point measurements.
[[nodiscard]] std::vector<Gaussian> point_kalman(const Gaussian& prior, const Eigen::MatrixXd& F,
                                                 const Eigen::MatrixXd& Q, const Eigen::MatrixXd& H,
                                                 const Eigen::MatrixXd& R,
                                                 const std::vector<Eigen::VectorXd>& z);

/// Monte Carlo estimate of the integral of l(Z|X) over the whole measurement space for an
/// alive trajectory with stacked state `x`, by importance sampling per measurement kind.
[[nodiscard]] double measurement_density_integral(const MeasurementModel& model,
                                                  const Eigen::VectorXd& x, int samples_per_kind,
                                                  Rng& rng);

}  // namespace tmpmbm::oracle
