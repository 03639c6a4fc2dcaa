#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace tmpmbm {

/// GOSPA (alpha = 2) and its decomposition. Each component is the p-th root of its
/// cost term, so total^p = localisation^p + missed^p + false_^p.
struct GospaResult {
    double total = 0.0;
    double localisation = 0.0;
    double missed = 0.0;
    double false_ = 0.0;
    int n_assigned = 0;
    int n_missed = 0;
    int n_false = 0;
};

struct GospaParams {
    double c = 10.0;
    double p = 2.0;
};

/// GOSPA between ground truth and estimates (Euclidean distance on the given vectors).
[[nodiscard]] GospaResult gospa(std::span<const Eigen::VectorXd> truth,
                                std::span<const Eigen::VectorXd> estimates,
                                const GospaParams& params = {});

/// Component-wise root mean square over a series. Throws on an empty series.
[[nodiscard]] GospaResult rms(std::span<const GospaResult> series);

}  // namespace tmpmbm
