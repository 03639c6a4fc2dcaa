#pragma once

#include "tmpmbm/simulation.hpp"

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmpmbm {

/// Invalid experiment configuration; what() starts with `file:line:column:`.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses a YAML experiment description. Relative fixture paths resolve against `base_dir`;
/// `source_name` prefixes diagnostics.
[[nodiscard]] ExperimentSpec parse_experiment(const std::string& yaml_text,
                                              const std::filesystem::path& base_dir,
                                              const std::string& source_name);

[[nodiscard]] ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_number(double value);

// ---- CSV outputs (fixed headers) ----

/// filter,N_w,p_full,clutter_rate,run,window,gospa_total,gospa_loc,gospa_missed,
/// gospa_false,n_local_hypo,n_global_hypo,step_ms
void write_results_csv(std::ostream& out, const std::vector<WindowRecord>& records);

/// filter,N_w,p_full,clutter_rate,runs,rms_gospa_total,rms_gospa_loc,rms_gospa_missed,
/// rms_gospa_false
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& summary);

/// filter,N_w,p_full,clutter_rate,mean_local_hypo,mean_global_hypo,max_local_hypo,
/// max_global_hypo
void write_hypotheses_csv(std::ostream& out, const std::vector<CellSummary>& summary);

/// filter,N_w,p_full,clutter_rate,mean_step_ms,mean_run_s
void write_timing_csv(std::ostream& out, const std::vector<CellSummary>& summary);

/// window,kind,z1_x,z1_y,z2_x,z2_y with empty fields for absent detections.
void write_measurements_csv(std::ostream& out, const std::vector<MeasurementSet>& windows);

}  // namespace tmpmbm
