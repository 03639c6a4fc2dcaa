// tmpmbm: Monte Carlo benchmark driver for the trajectory-measurement PMBM/PMB filters.

#include "tmpmbm/experiment_io.hpp"
#include "tmpmbm/simulation.hpp"
#include "tmpmbm/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tmpmbm;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMissingConfig = 2;
constexpr int kExitBadConfig = 3;

struct RunOptions {
    std::string config;
    std::string out = "results";
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> filters;
    std::optional<int> threads;
    std::optional<std::string> timing;
};

struct MeasurementOptions {
    std::string config;
    std::string out;
    std::size_t cell = 0;
    int run = 0;
    std::optional<std::uint64_t> seed;
};

// Loads the configuration, printing the diagnostic and setting `exit_code` on failure.
std::optional<ExperimentSpec> load(const std::string& path, int& exit_code) {
    if (!fs::exists(path)) {
        std::cerr << "error: configuration file not found: " << path << '\n';
        exit_code = kExitMissingConfig;
        return std::nullopt;
    }
    try {
        return load_experiment(path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        exit_code = kExitBadConfig;
        return std::nullopt;
    }
}

bool write_file(const fs::path& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << '\n';
        return false;
    }
    writer(out);
    out.flush();
    return static_cast<bool>(out);
}

int run_command(const RunOptions& opt) {
    int code = 0;
    auto spec = load(opt.config, code);
    if (!spec) return code;
    if (opt.runs) spec->runs = *opt.runs;
    if (opt.seed) spec->seed = *opt.seed;
    if (opt.threads) spec->threads = *opt.threads;
    if (opt.timing) spec->record_timing = *opt.timing == "on";
    if (!opt.filters.empty()) {
        spec->filters.clear();
        for (const auto& f : opt.filters) spec->filters.push_back(*parse_filter_kind(f));
    }
    if (spec->runs < 1) {
        std::cerr << "error: --runs must be at least 1\n";
        return kExitBadConfig;
    }

    const fs::path out_dir(opt.out);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << '\n';
        return kExitFailure;
    }

    std::cerr << "running " << spec->cells().size() << " sweep cells x " << spec->runs << " runs x "
              << spec->filters.size() << " filters\n";
    ExperimentResults results;
    try {
        results = run_monte_carlo(*spec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }

    bool ok = write_file(out_dir / "results.csv", [&](std::ostream& o) { write_results_csv(o, results.records); });
    ok = write_file(out_dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, results.summary); }) && ok;
    ok = write_file(out_dir / "hypotheses.csv",
                    [&](std::ostream& o) { write_hypotheses_csv(o, results.summary); }) && ok;
    ok = write_file(out_dir / "timing.csv", [&](std::ostream& o) { write_timing_csv(o, results.summary); }) && ok;

    for (const auto& e : results.errors) std::cerr << "run failed: " << e << '\n';
    if (!results.errors.empty() || !ok) return kExitFailure;

    std::cout << std::left << std::setw(9) << "filter" << std::setw(5) << "N_w" << std::setw(8) << "p_full"
              << std::setw(9) << "clutter" << "rms_gospa\n";
    for (const auto& s : results.summary) {
        std::cout << std::left << std::setw(9) << to_string(s.filter) << std::setw(5) << s.cell.window_length
                  << std::setw(8) << s.cell.full_prob << std::setw(9) << s.cell.clutter_rate
                  << std::setprecision(5) << s.rms.total << '\n';
    }
    std::cout << "wrote " << (out_dir / "results.csv").string() << ", summary.csv, hypotheses.csv, timing.csv\n";
    return 0;
}

int validate_command(const ValidationOptions& opt) {
    const auto results = run_validation(opt);
    bool all = true;
    std::cout << std::left << std::setw(24) << "suite" << std::setw(8) << "result" << "seconds\n";
    for (const auto& r : results) {
        all = all && r.passed;
        std::cout << std::left << std::setw(24) << r.name << std::setw(8) << (r.passed ? "PASS" : "FAIL")
                  << std::fixed << std::setprecision(3) << r.seconds;
        if (!r.passed) std::cout << "  " << r.detail;
        std::cout << '\n';
    }
    return all ? 0 : kExitFailure;
}

int fixture_command(std::uint64_t seed, int steps, const std::string& out) {
    try {
        save_truth_csv(scenario1_truth(seed, steps), out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    std::cout << "wrote " << out << '\n';
    return 0;
}

int measurements_command(const MeasurementOptions& opt) {
    int code = 0;
    auto spec = load(opt.config, code);
    if (!spec) return code;
    if (opt.seed) spec->seed = *opt.seed;
    if (opt.cell >= spec->cells().size()) {
        std::cerr << "error: --cell must be below " << spec->cells().size() << '\n';
        return kExitBadConfig;
    }
    const RunData data = simulate_run(*spec, opt.cell, opt.run);
    if (opt.out.empty()) {
        write_measurements_csv(std::cout, data.windows);
        return 0;
    }
    return write_file(opt.out, [&](std::ostream& o) { write_measurements_csv(o, data.windows); }) ? 0
                                                                                               : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trajectory-measurement PMBM/PMB filters: Monte Carlo benchmark and oracle checks"};
    app.require_subcommand(0, 1);

    ValidationOptions validation;
    bool validate_flag = false;
    app.add_flag("--validate", validate_flag, "Run the oracle suites (same as the validate subcommand)");
    app.add_flag("--inject-fault", validation.inject_fault)->group("");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run the Monte Carlo sweep described by a config file");
    run_cmd->add_option("-c,--config", run.config, "YAML experiment config")->required();
    run_cmd->add_option("-o,--out", run.out, "Output directory")->capture_default_str();
    run_cmd->add_option("--runs", run.runs, "Monte Carlo runs per sweep cell");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--filters", run.filters, "Subset of tm-pmbm, tm-pmb, pmbm, pmb")
        ->check(CLI::IsMember({"tm-pmbm", "tm-pmb", "pmbm", "pmb"}))
        ->delimiter(',');
    run_cmd->add_option("--threads", run.threads, "Worker threads (default: TMPMBM_THREADS or all cores)");
    run_cmd->add_option("--timing", run.timing, "Record step wall times (off gives reproducible bytes)")
        ->check(CLI::IsMember({"on", "off"}));

    auto* validate_cmd = app.add_subcommand("validate", "Run the built-in oracle suites");
    validate_cmd->add_option("--seed", validation.seed, "Seed for the randomised suites");
    validate_cmd->add_flag("--inject-fault", validation.inject_fault)->group("");

    std::uint64_t fixture_seed = 20240611;
    int fixture_steps = 250;
    std::string fixture_out = "data/scenario1_truth.csv";
    auto* fixture_cmd = app.add_subcommand("fixture", "Write the Scenario 1 ground-truth fixture");
    fixture_cmd->add_option("--seed", fixture_seed)->capture_default_str();
    fixture_cmd->add_option("--steps", fixture_steps)->capture_default_str();
    fixture_cmd->add_option("-o,--out", fixture_out)->capture_default_str();

    MeasurementOptions meas;
    auto* meas_cmd = app.add_subcommand("measurements", "Dump the trajectory measurements of one run");
    meas_cmd->add_option("-c,--config", meas.config, "YAML experiment config")->required();
    meas_cmd->add_option("--cell", meas.cell, "Sweep cell index, in config order")->capture_default_str();
    meas_cmd->add_option("--run", meas.run, "Run index")->capture_default_str();
    meas_cmd->add_option("--seed", meas.seed, "Master seed");
    meas_cmd->add_option("-o,--out", meas.out, "Output CSV (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    if (validate_flag || validate_cmd->parsed()) return validate_command(validation);
    if (run_cmd->parsed()) return run_command(run);
    if (fixture_cmd->parsed()) return fixture_command(fixture_seed, fixture_steps, fixture_out);
    if (meas_cmd->parsed()) return measurements_command(meas);
    std::cout << app.help();
    return 0;
}
