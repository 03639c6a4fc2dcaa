#include "tmpmbm/baseline.hpp"

#include <stdexcept>

namespace tmpmbm {

MeasurementSet strip_measurements(const MeasurementSet& measurements) {
    MeasurementSet out;
    for (const auto& z : measurements) {
        if (z.kind() == MeasurementKind::FirstOnly) continue;
        out.push_back(TrajectoryMeasurement::last_only(*z.z_last()));
    }
    return out;
}

FilterConfig baseline_config(const FilterConfig& trajectory_cfg) {
    FilterConfig out = trajectory_cfg;
    out.meas = trajectory_cfg.meas.window_end_equivalent();
    out.clutter = trajectory_cfg.clutter.window_end_equivalent();
    return out;
}

StepResult baseline_step(const PmbmState& posterior, const MeasurementSet& points,
                         const FilterConfig& baseline_cfg) {
    if (baseline_cfg.meas.mode != DetectionMode::WindowEndPoint) {
        throw std::invalid_argument("baseline_step: configuration is not a window-end point model");
    }
    for (const auto& z : points) {
        if (z.kind() != MeasurementKind::LastOnly) {
            throw InvalidMeasurementError("baseline_step: expected window-end point measurements");
        }
    }
    return step(posterior, points, baseline_cfg);
}

}  // namespace tmpmbm
