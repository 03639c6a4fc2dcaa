#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tmpmbm {

/// Fine-step bookkeeping for one time window: window_interval = fine_interval * fine_steps.
class WindowClock {
public:
    WindowClock(int fine_steps_per_window, double fine_interval);

    [[nodiscard]] int fine_steps_per_window() const { return fine_steps_; }
    [[nodiscard]] double fine_interval() const { return fine_interval_; }
    [[nodiscard]] double window_interval() const { return fine_interval_ * fine_steps_; }

    /// Fine step at which window `k` ends; window 0 is the initial instant `origin`.
    [[nodiscard]] int boundary(int window_index, int origin) const {
        return origin + window_index * fine_steps_;
    }

private:
    int fine_steps_;
    double fine_interval_;
};

/// Which of the three disjoint two-step trajectory spaces a trajectory belongs to.
enum class TrajectoryKind {
    DiedInWindow,  ///< state at the window start only
    BornAtEnd,     ///< state at the window end only
    Alive,         ///< states at both window ends
};

/// Which of the three disjoint trajectory-measurement spaces a measurement belongs to.
enum class MeasurementKind {
    FirstOnly,  ///< detection at the window start
    LastOnly,   ///< detection at the window end
    Full,       ///< detections at both ends
};

[[nodiscard]] std::string_view to_string(MeasurementKind kind);
[[nodiscard]] std::optional<MeasurementKind> parse_measurement_kind(std::string_view text);
[[nodiscard]] std::string_view to_string(TrajectoryKind kind);

class InvalidMeasurementError : public std::invalid_argument {
public:
    explicit InvalidMeasurementError(const std::string& what) : std::invalid_argument(what) {}
};

/// (space index mu in {1,2,3}, number of point detections iota in {1,2})
struct MeasurementDim {
    int mu;
    int iota;
};

[[nodiscard]] MeasurementDim measurement_dim(MeasurementKind kind);

/// Space index tau in {1,2,3} of a trajectory kind.
[[nodiscard]] int trajectory_space_index(TrajectoryKind kind);

/// A sensor output spanning one window: a point detection at either end, or a full
/// two-point measurement.
class TrajectoryMeasurement {
public:
    static TrajectoryMeasurement make(MeasurementKind kind, std::optional<Eigen::VectorXd> z_first,
                                      std::optional<Eigen::VectorXd> z_last);
    static TrajectoryMeasurement first_only(Eigen::VectorXd z);
    static TrajectoryMeasurement last_only(Eigen::VectorXd z);
    static TrajectoryMeasurement full(Eigen::VectorXd z_first, Eigen::VectorXd z_last);

    [[nodiscard]] MeasurementKind kind() const { return kind_; }
    [[nodiscard]] const std::optional<Eigen::VectorXd>& z_first() const { return z_first_; }
    [[nodiscard]] const std::optional<Eigen::VectorXd>& z_last() const { return z_last_; }

    /// All point detections stacked in time order (n_z or 2 n_z entries).
    [[nodiscard]] Eigen::VectorXd stacked() const;

    /// Start time relative to the window start: 0 for FirstOnly/Full, 1 for LastOnly.
    [[nodiscard]] int start_offset() const { return kind_ == MeasurementKind::LastOnly ? 1 : 0; }

private:
    TrajectoryMeasurement(MeasurementKind kind, std::optional<Eigen::VectorXd> z_first,
                          std::optional<Eigen::VectorXd> z_last)
        : kind_(kind), z_first_(std::move(z_first)), z_last_(std::move(z_last)) {}

    MeasurementKind kind_;
    std::optional<Eigen::VectorXd> z_first_;
    std::optional<Eigen::VectorXd> z_last_;
};

using MeasurementSet = std::vector<TrajectoryMeasurement>;

}  // namespace tmpmbm
