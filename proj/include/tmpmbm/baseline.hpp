#pragma once

#include "tmpmbm/tm_filter.hpp"

namespace tmpmbm {

/// Keeps only the window-end detections: Full -> z_last, LastOnly -> z, FirstOnly dropped.
/// The result holds LastOnly measurements.
[[nodiscard]] MeasurementSet strip_measurements(const MeasurementSet& measurements);

/// Point-measurement PMBM/PMB configuration equivalent to a trajectory-measurement one:
/// detection probability p^D (1 - gamma) at the window end only, clutter rate
/// rate_full + rate_partial uniform on the region.
[[nodiscard]] FilterConfig baseline_config(const FilterConfig& trajectory_cfg);

/// Standard PMBM (or PMB) step on target states with window-end point measurements.
[[nodiscard]] StepResult baseline_step(const PmbmState& posterior, const MeasurementSet& points,
                                       const FilterConfig& baseline_cfg);

}  // namespace tmpmbm
