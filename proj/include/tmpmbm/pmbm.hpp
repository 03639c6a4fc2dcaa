#pragma once

#include "tmpmbm/gaussian.hpp"
#include "tmpmbm/trajectory.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmpmbm {

/// What a single-object density describes.
enum class DensityForm {
    Target,      ///< one state at the current time
    BornAtEnd,   ///< two-step trajectory that starts at the window end (one state)
    Trajectory,  ///< two-step trajectory started at the window start: died or alive branch
};

/// Component of the Poisson intensity of undetected objects.
struct PoissonComponent {
    double weight = 0.0;
    /// Target, BornAtEnd, or Trajectory (alive trajectory, stacked 2 n_x state).
    DensityForm form = DensityForm::Target;
    Gaussian gaussian;
};

/// One local hypothesis of a potential target: a Bernoulli component and its
/// (log) likelihood factor.
///
/// For DensityForm::Trajectory the density is the two-branch mixture
///   beta[0] N(x_k; died) + beta[1] N(x_{k:k+1}; state),
/// otherwise it is the single Gaussian `state` and `beta`/`died` are unused.
struct LocalHypothesis {
    double log_weight = 0.0;
    double existence = 0.0;
    DensityForm form = DensityForm::Target;
    std::array<double, 2> beta{0.0, 1.0};
    Gaussian died;
    Gaussian state;

    /// Gaussian of the state at the current (window-end) time.
    [[nodiscard]] Gaussian current_state() const;
};

/// Index used in a global hypothesis for a potential target that does not exist.
inline constexpr int kAbsent = -1;

/// One joint association: a local-hypothesis index (or kAbsent) per potential target.
struct GlobalHypothesis {
    double weight = 0.0;
    std::vector<int> assignment;
};

enum class StateForm { Target, Trajectory };

/// Poisson multi-Bernoulli mixture over target states or two-step trajectories.
struct PmbmState {
    StateForm form = StateForm::Target;
    std::vector<PoissonComponent> poisson;
    std::vector<std::vector<LocalHypothesis>> targets;
    std::vector<GlobalHypothesis> globals{GlobalHypothesis{1.0, {}}};

    [[nodiscard]] std::size_t num_targets() const { return targets.size(); }
};

class EmptyPosteriorError : public std::runtime_error {
public:
    explicit EmptyPosteriorError(const std::string& what) : std::runtime_error(what) {}
};

struct PruneThresholds {
    double poisson = 1e-5;
    double global = 1e-4;
    double bernoulli = 1e-5;
    std::size_t max_globals = 200;
};

/// Normalises global weights and prunes Poisson components, Bernoulli components,
/// and global hypotheses, then drops unreferenced local hypotheses and targets.
[[nodiscard]] PmbmState normalize_and_prune(PmbmState state, const PruneThresholds& thresholds);

/// Means of the Bernoulli components with existence above `existence_threshold` in the
/// highest-weight global hypothesis. Requires a target-form state.
[[nodiscard]] std::vector<Eigen::VectorXd> estimate(const PmbmState& state,
                                                    double existence_threshold = 0.1);

/// Marginal association weight of each local hypothesis of target `i`.
[[nodiscard]] std::vector<double> marginal_hypothesis_weights(const PmbmState& state,
                                                              std::size_t i);

/// Collapses the mixture to a single global hypothesis (track-oriented PMB). Each target
/// becomes one Bernoulli whose density is the moment-matched marginal mixture, per branch
/// for trajectory densities.
[[nodiscard]] PmbmState kld_merge_to_pmb(const PmbmState& state);

struct HypothesisCounts {
    std::size_t local = 0;
    std::size_t global = 0;
};

[[nodiscard]] HypothesisCounts hypothesis_counts(const PmbmState& state);

/// Human-readable dump of the hypothesis structure.
[[nodiscard]] std::string describe(const PmbmState& state);

}  // namespace tmpmbm
