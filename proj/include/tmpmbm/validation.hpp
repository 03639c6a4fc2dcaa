#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tmpmbm {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    std::uint64_t seed = 2024;
    /// Test hook: corrupts one library result before it is compared, so the suite must fail.
    bool inject_fault = false;
};

/// murty_kbest with k = n! against exhaustive enumeration on random matrices up to
/// max_dim x max_dim: costs within 1e-12 and identical ordering.
[[nodiscard]] SuiteResult check_murty(int trials, int max_dim, const ValidationOptions& opt = {});

/// gospa against brute-force partial matchings on random 2-D set pairs (sizes up to
/// max_size) within 1e-12, plus the empty and one-missed hand cases.
[[nodiscard]] SuiteResult check_gospa(int trials, int max_size, const ValidationOptions& opt = {});

/// Single target, no clutter, p^D = full-measurement probability = 1: TM-PMBM window-end
/// posteriors against the stacked-measurement Kalman oracle within 1e-9.
[[nodiscard]] SuiteResult check_kalman(int windows, const ValidationOptions& opt = {});

/// Point-measurement baseline with unit detection probability against a plain Kalman filter.
[[nodiscard]] SuiteResult check_baseline_kalman(int windows, const ValidationOptions& opt = {});

/// Integral of l(Z|X) for alive trajectories: analytic value and Monte Carlo within 1e-2.
[[nodiscard]] SuiteResult check_density_integral(int samples_per_kind, const ValidationOptions& opt = {});

/// Invariants of predict/update/marginalise/step over random scenarios.
[[nodiscard]] SuiteResult check_recursion_invariants(int seeds, int windows,
                                                     const ValidationOptions& opt = {});

/// merge-then-marginalise against marginalise-then-merge on random updated states, 1e-12.
[[nodiscard]] SuiteResult check_order_swap(int states, const ValidationOptions& opt = {});

/// The suites run by `tmpmbm validate`.
[[nodiscard]] std::vector<SuiteResult> run_validation(const ValidationOptions& opt = {});

}  // namespace tmpmbm
