#include "tmpmbm/trajectory.hpp"

namespace tmpmbm {

WindowClock::WindowClock(int fine_steps_per_window, double fine_interval)
    : fine_steps_(fine_steps_per_window), fine_interval_(fine_interval) {
    if (fine_steps_per_window <= 0 || !(fine_interval > 0.0)) {
        throw std::invalid_argument("WindowClock: steps and interval must be positive");
    }
}

std::string_view to_string(MeasurementKind kind) {
    switch (kind) {
        case MeasurementKind::FirstOnly: return "first";
        case MeasurementKind::LastOnly: return "last";
        case MeasurementKind::Full: return "full";
    }
    return "?";
}

std::optional<MeasurementKind> parse_measurement_kind(std::string_view text) {
    if (text == "first") return MeasurementKind::FirstOnly;
    if (text == "last") return MeasurementKind::LastOnly;
    if (text == "full") return MeasurementKind::Full;
    return std::nullopt;
}

std::string_view to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::DiedInWindow: return "died";
        case TrajectoryKind::BornAtEnd: return "born";
        case TrajectoryKind::Alive: return "alive";
    }
    return "?";
}

MeasurementDim measurement_dim(MeasurementKind kind) {
    switch (kind) {
        case MeasurementKind::FirstOnly: return {1, 1};
        case MeasurementKind::LastOnly: return {2, 1};
        case MeasurementKind::Full: return {3, 2};
    }
    return {0, 0};
}

int trajectory_space_index(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::DiedInWindow: return 1;
        case TrajectoryKind::BornAtEnd: return 2;
        case TrajectoryKind::Alive: return 3;
    }
    return 0;
}

TrajectoryMeasurement TrajectoryMeasurement::make(MeasurementKind kind,
                                                  std::optional<Eigen::VectorXd> z_first,
                                                  std::optional<Eigen::VectorXd> z_last) {
    const bool want_first = kind != MeasurementKind::LastOnly;
    const bool want_last = kind != MeasurementKind::FirstOnly;
    if (z_first.has_value() != want_first || z_last.has_value() != want_last) {
        throw InvalidMeasurementError("measurement of kind '" + std::string(to_string(kind)) +
                                      "' has missing or extra endpoints");
    }
    if (z_first && z_last && z_first->size() != z_last->size()) {
        throw InvalidMeasurementError("full measurement endpoints differ in dimension");
    }
    return {kind, std::move(z_first), std::move(z_last)};
}

TrajectoryMeasurement TrajectoryMeasurement::first_only(Eigen::VectorXd z) {
    return make(MeasurementKind::FirstOnly, std::move(z), std::nullopt);
}

TrajectoryMeasurement TrajectoryMeasurement::last_only(Eigen::VectorXd z) {
    return make(MeasurementKind::LastOnly, std::nullopt, std::move(z));
}

TrajectoryMeasurement TrajectoryMeasurement::full(Eigen::VectorXd z_first, Eigen::VectorXd z_last) {
    return make(MeasurementKind::Full, std::move(z_first), std::move(z_last));
}

Eigen::VectorXd TrajectoryMeasurement::stacked() const {
    if (kind_ == MeasurementKind::Full) {
        Eigen::VectorXd out(z_first_->size() + z_last_->size());
        out << *z_first_, *z_last_;
        return out;
    }
    return z_first_ ? *z_first_ : *z_last_;
}

}  // namespace tmpmbm
