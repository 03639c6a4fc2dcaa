#pragma once

#include "tmpmbm/gaussian.hpp"
#include "tmpmbm/trajectory.hpp"

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <vector>

namespace tmpmbm {

using Rng = std::mt19937_64;

// ---- Motion ----

/// Linear-Gaussian motion over one interval with constant survival probability.
struct MotionModel {
    Eigen::MatrixXd F;
    Eigen::MatrixXd Q;
    double survival = 1.0;

    /// Nearly constant velocity model on [px, vx, py, vy] over `interval` seconds.
    static MotionModel nearly_constant_velocity(double interval, double q, double survival);

    /// Window-level model: interval T * N_w and survival (p_fine)^N_w.
    static MotionModel for_window(const WindowClock& clock, double q, double survival_per_fine_step);

    [[nodiscard]] Eigen::Index state_dim() const { return F.rows(); }
};

// ---- Measurement ----

/// Which trajectory kinds can be detected and which measurement kinds they produce.
enum class DetectionMode {
    /// Trajectory measurements: every two-step trajectory is detectable.
    Trajectory,
    /// Only the window-end state is observed, as a LastOnly measurement. Used by the
    /// point-measurement baseline.
    WindowEndPoint,
};

struct MeasurementModel {
    Eigen::MatrixXd H;
    Eigen::MatrixXd R;
    double detect_prob = 0.9;
    /// Probability of a full measurement given an alive trajectory is detected.
    double full_given_detect = 0.9;
    DetectionMode mode = DetectionMode::Trajectory;

    /// Probability of each single-ended measurement of an alive trajectory.
    [[nodiscard]] double gamma() const { return 0.5 * (1.0 - full_given_detect); }

    [[nodiscard]] double detection_probability(TrajectoryKind kind) const;

    /// Scalar factor multiplying the Gaussian part of l(Z|X); zero for incompatible pairs.
    [[nodiscard]] double kind_factor(MeasurementKind z_kind, TrajectoryKind x_kind) const;

    [[nodiscard]] Eigen::Index meas_dim() const { return H.rows(); }
    [[nodiscard]] Eigen::Index state_dim() const { return H.cols(); }

    /// Position-only observation of [px, vx, py, vy] with R = sigma2 * I.
    static MeasurementModel position_2d(double sigma2, double detect_prob, double full_given_detect);

    /// Window-end point model with detection probability p^D (1 - gamma).
    [[nodiscard]] MeasurementModel window_end_equivalent() const;
};

/// H_{mu,tau} and R_iota for measurement space mu and trajectory space tau. Throws
/// std::invalid_argument for pairings whose observation matrix is zero.
[[nodiscard]] LinearObservation observation_matrix(const MeasurementModel& model, int mu, int tau);
[[nodiscard]] LinearObservation observation_matrix(const MeasurementModel& model,
                                                   MeasurementKind z_kind, TrajectoryKind x_kind);

/// l(Z|X) for a trajectory of kind `x_kind` with stacked state `x`.
[[nodiscard]] double measurement_density(const MeasurementModel& model,
                                         const TrajectoryMeasurement& z, TrajectoryKind x_kind,
                                         const Eigen::VectorXd& x);

/// Draws the measurement generated by one trajectory, or nothing when it is missed.
[[nodiscard]] std::optional<TrajectoryMeasurement> sample_target_measurement(
    const MeasurementModel& model, TrajectoryKind x_kind, const Eigen::VectorXd& x_true, Rng& rng);

// ---- Birth ----

struct BirthComponent {
    double weight = 0.0;
    Gaussian gaussian;
};

struct BirthModel {
    std::vector<BirthComponent> components;

    [[nodiscard]] double total_weight() const;
};

/// Births at each fine step of a window, propagated to the window end with fine-step
/// dynamics and survival, then reduced to one moment-matched component.
[[nodiscard]] BirthModel window_birth(const BirthModel& per_fine_step, const MotionModel& fine_motion,
                                      int fine_steps_per_window);

// ---- Clutter ----

/// Axis-aligned box in measurement space.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    [[nodiscard]] double volume() const;
    [[nodiscard]] bool contains(const Eigen::VectorXd& z) const;
    [[nodiscard]] Eigen::VectorXd sample(Rng& rng) const;

    static Box rectangle(double x_min, double x_max, double y_min, double y_max);
};

struct ClutterRate {
    double total;       ///< rate_full + 2 rate_partial
    double window_end;  ///< rate_full + rate_partial, clutter seen at the window end
};

/// Poisson clutter on the trajectory-measurement space, uniform over the region.
struct ClutterModel {
    double rate_full = 0.0;
    double rate_partial = 0.0;
    Box region;

    /// Splits a total rate equally between full and each partial kind.
    static ClutterModel equal_split(double total_rate, Box region);

    /// Point clutter at the window end with rate rate_full + rate_partial.
    [[nodiscard]] ClutterModel window_end_equivalent() const;
};

[[nodiscard]] double clutter_intensity(const ClutterModel& model, const TrajectoryMeasurement& z);
[[nodiscard]] ClutterRate clutter_rate(const ClutterModel& model);
[[nodiscard]] MeasurementSet sample_clutter(const ClutterModel& model, Rng& rng);

}  // namespace tmpmbm
