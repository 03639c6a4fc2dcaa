#pragma once

#include "tmpmbm/models.hpp"
#include "tmpmbm/pmbm.hpp"
#include "tmpmbm/trajectory.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace tmpmbm {

enum class Variant { Pmbm, Pmb };

struct FilterThresholds : PruneThresholds {
    /// Squared Mahalanobis gate, applied independently to each measurement end.
    double gate = 9.0;
    /// Existence threshold for reporting an estimate.
    double estimate_existence = 0.1;
};

/// Everything the recursion needs for one window. `motion` and `birth` are window-level:
/// F, Q and survival span the whole window, birth describes targets appearing by its end.
struct FilterConfig {
    MotionModel motion;
    MeasurementModel meas;
    BirthModel birth;
    ClutterModel clutter;
    FilterThresholds thresholds;
    Variant variant = Variant::Pmbm;
};

// ---- Prediction ----

/// Target-form posterior at the window start -> trajectory-form prediction over the window.
[[nodiscard]] PmbmState predict(const PmbmState& posterior, const FilterConfig& cfg);

// ---- Update ----

/// Undetected intensity: every component weight scaled by 1 - p^D.
[[nodiscard]] std::vector<PoissonComponent> update_poisson(std::vector<PoissonComponent> predicted,
                                                           const FilterConfig& cfg);

/// Missed-detection hypothesis of a predicted trajectory Bernoulli.
[[nodiscard]] LocalHypothesis update_bernoulli_missed(const LocalHypothesis& hyp,
                                                      const FilterConfig& cfg);

/// Detection hypothesis of a predicted trajectory Bernoulli for one measurement, or nullopt
/// if the measurement cannot originate from it.
[[nodiscard]] std::optional<LocalHypothesis> update_bernoulli_detection(
    const LocalHypothesis& hyp, const TrajectoryMeasurement& z, const FilterConfig& cfg);

/// True if at least one end of `z` falls inside the gate of the hypothesis.
[[nodiscard]] bool gate_hypothesis(const LocalHypothesis& hyp, const TrajectoryMeasurement& z,
                                   const FilterConfig& cfg);

/// Indices of predicted Poisson components whose gate contains at least one end of `z`.
[[nodiscard]] std::vector<std::size_t> gate_poisson(std::span<const PoissonComponent> predicted,
                                                    const TrajectoryMeasurement& z,
                                                    const FilterConfig& cfg);

/// The two local hypotheses of the potential target first detected by `z`.
struct NewBernoulli {
    LocalHypothesis missed;     ///< w = 1, r = 0
    LocalHypothesis detection;  ///< w = clutter + sum of v, r = sum of v / w
};

/// Builds the new Bernoulli from the listed predicted Poisson components. Weight and
/// existence use all listed components; the density is the update of the component with
/// the largest contribution.
[[nodiscard]] NewBernoulli create_new_bernoulli(std::span<const PoissonComponent> predicted,
                                                const TrajectoryMeasurement& z,
                                                const FilterConfig& cfg,
                                                std::span<const std::size_t> components);

/// Full PMBM update with a set of trajectory measurements; returns a pruned trajectory-form
/// state.
[[nodiscard]] PmbmState update(const PmbmState& predicted, const MeasurementSet& measurements,
                               const FilterConfig& cfg);

// ---- Marginalisation ----

/// Keeps the window-end state of every trajectory: r^M = r beta(2) and the window-end block.
[[nodiscard]] PmbmState marginalise(const PmbmState& updated);

// ---- Full recursion ----

struct StepDiagnostics {
    HypothesisCounts updated;    ///< after the update, before any PMB merge
    HypothesisCounts posterior;  ///< after marginalisation and pruning
    double step_ms = 0.0;
};

struct StepResult {
    PmbmState posterior;
    std::vector<Eigen::VectorXd> estimates;
    StepDiagnostics diagnostics;
};

/// predict -> update -> (PMB: merge) -> marginalise -> prune -> estimate.
[[nodiscard]] StepResult step(const PmbmState& posterior, const MeasurementSet& measurements,
                              const FilterConfig& cfg);

}  // namespace tmpmbm
