#pragma once

#include "tmpmbm/gospa.hpp"
#include "tmpmbm/models.hpp"
#include "tmpmbm/tm_filter.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmpmbm {

// ---- Ground truth ----

/// One target: consecutive fine-step states starting at `birth_step`.
struct TruthTrack {
    int birth_step = 1;
    std::vector<Eigen::VectorXd> states;

    [[nodiscard]] int last_step() const { return birth_step + static_cast<int>(states.size()) - 1; }
    [[nodiscard]] bool alive_at(int step) const { return step >= birth_step && step <= last_step(); }
    [[nodiscard]] const Eigen::VectorXd& state_at(int step) const;
};

struct GroundTruth {
    int n_fine_steps = 0;
    std::vector<TruthTrack> tracks;

    /// States of the targets alive at `step`, in track order.
    [[nodiscard]] std::vector<Eigen::VectorXd> states_at(int step) const;
};

struct BirthSpec {
    double rate = 0.0;
    Gaussian gaussian;
};

struct ScenarioConfig {
    std::string name;
    Box area;
    double fine_interval = 0.2;
    int n_fine_steps = 250;
    double process_noise = 0.01;
    /// p^{S,T} assumed by the filters.
    double survival_per_step = 0.99;
    /// Filter birth intensity at the first fine step and at each later fine step.
    BirthSpec filter_initial_birth;
    BirthSpec filter_birth;
    /// Random-truth mode: births per fine step, appearance density, mean lifespan (s).
    BirthSpec truth_birth;
    double mean_lifespan = 1000.0;
    /// Fixed-truth mode when set.
    std::optional<GroundTruth> fixed_truth;
};

/// [0,100]^2, four fixed targets (see scenario1_truth), birth 3 then 0.005 per fine step.
[[nodiscard]] ScenarioConfig scenario1(GroundTruth fixed_truth);
/// [0,600]x[0,400], 0.16 appearances per fine step, mean lifespan 1000 s.
[[nodiscard]] ScenarioConfig scenario2();

/// Four nearly-constant-velocity targets alive over [1, n_fine_steps] that meet near the
/// centre of [0,100]^2 at step 125, where track 0 ends.
[[nodiscard]] GroundTruth scenario1_truth(std::uint64_t seed, int n_fine_steps = 250);

[[nodiscard]] GroundTruth generate_ground_truth(const ScenarioConfig& cfg, Rng& rng);

/// CSV with header `track,step,px,vx,py,vy`.
void save_truth_csv(const GroundTruth& truth, const std::filesystem::path& path);
[[nodiscard]] GroundTruth load_truth_csv(const std::filesystem::path& path, int n_fine_steps);

// ---- Windows and measurements ----

/// Fine steps b_k = 1 + k N_w that bound complete windows within the horizon.
[[nodiscard]] std::vector<int> window_boundaries(int n_fine_steps, int fine_steps_per_window);

struct WindowTrajectory {
    std::size_t track = 0;
    TrajectoryKind kind = TrajectoryKind::Alive;
    /// x_start, x_end, or [x_start; x_end] depending on `kind`.
    Eigen::VectorXd state;
};

/// Two-step trajectories of every track present at either boundary of [start, end].
[[nodiscard]] std::vector<WindowTrajectory> window_trajectories(const GroundTruth& truth,
                                                                int start_step, int end_step);

[[nodiscard]] MeasurementSet generate_measurements(const GroundTruth& truth, int start_step,
                                                   int end_step, const MeasurementModel& meas,
                                                   const ClutterModel& clutter, Rng& rng);

// ---- Monte Carlo experiments ----

enum class FilterKind { TmPmbm, TmPmb, Pmbm, Pmb };

[[nodiscard]] std::string_view to_string(FilterKind kind);
[[nodiscard]] std::optional<FilterKind> parse_filter_kind(std::string_view text);
[[nodiscard]] bool uses_trajectory_measurements(FilterKind kind);

/// One point of the parameter sweep.
struct SweepCell {
    int window_length = 7;
    double full_prob = 0.7;
    double clutter_rate = 10.0;
};

struct ExperimentSpec {
    ScenarioConfig scenario;
    double detect_prob = 0.9;
    double meas_noise = 0.1;
    FilterThresholds thresholds;
    GospaParams gospa;
    std::vector<int> window_lengths{2, 5, 7, 10};
    std::vector<double> full_probs{0.7, 0.9};
    std::vector<double> clutter_rates{0.1, 1.0, 10.0};
    std::vector<FilterKind> filters{FilterKind::TmPmbm, FilterKind::TmPmb, FilterKind::Pmbm,
                                    FilterKind::Pmb};
    int runs = 30;
    std::uint64_t seed = 1;
    /// 0 selects the TMPMBM_THREADS environment variable, else the hardware concurrency.
    int threads = 0;
    /// When false, step times are reported as zero so outputs are reproducible byte for byte.
    bool record_timing = true;

    [[nodiscard]] std::vector<SweepCell> cells() const;
};

/// Trajectory-measurement filter configuration of one sweep cell.
[[nodiscard]] FilterConfig make_filter_config(const ExperimentSpec& spec, const SweepCell& cell,
                                              Variant variant);

/// Initial posterior: the filter's first-step birth intensity as an undetected PPP.
[[nodiscard]] PmbmState initial_posterior(const ScenarioConfig& scenario);

/// Truth and trajectory measurements of one (cell, run), shared by every filter.
struct RunData {
    GroundTruth truth;
    std::vector<int> bounds;
    std::vector<MeasurementSet> windows;
};

/// Draws the truth from the (seed, run) stream and the measurements from the
/// (seed, cell, run) stream.
[[nodiscard]] RunData simulate_run(const ExperimentSpec& spec, std::size_t cell_index, int run);

struct WindowRecord {
    FilterKind filter = FilterKind::TmPmbm;
    SweepCell cell;
    int run = 0;
    int window = 0;
    GospaResult gospa;
    HypothesisCounts counts;
    double step_ms = 0.0;
};

struct CellSummary {
    FilterKind filter = FilterKind::TmPmbm;
    SweepCell cell;
    int runs = 0;
    GospaResult rms;
    double mean_local_hypotheses = 0.0;
    double mean_global_hypotheses = 0.0;
    std::size_t max_local_hypotheses = 0;
    std::size_t max_global_hypotheses = 0;
    double mean_step_ms = 0.0;
    double mean_run_ms = 0.0;
};

struct ExperimentResults {
    std::vector<WindowRecord> records;
    std::vector<CellSummary> summary;
    /// One message per failed (cell, run); records of failed runs are omitted.
    std::vector<std::string> errors;
};

/// Runs every filter on identical measurement sets per (cell, run, window). Results do not
/// depend on the thread count.
[[nodiscard]] ExperimentResults run_monte_carlo(const ExperimentSpec& spec);

/// RMS GOSPA and hypothesis statistics per (filter, cell), in sweep order.
[[nodiscard]] std::vector<CellSummary> summarise(const ExperimentSpec& spec,
                                                 const std::vector<WindowRecord>& records);

}  // namespace tmpmbm
