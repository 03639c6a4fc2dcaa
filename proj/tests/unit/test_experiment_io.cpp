#include "tmpmbm/experiment_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace tmpmbm;

namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

const std::string kMinimal = "scenario:\n  name: scenario2\n";

}  // namespace

TEST(ParseExperiment, Defaults) {
    const auto spec = parse_experiment(kMinimal, ".", "mem.yaml");
    EXPECT_EQ(spec.scenario.name, "scenario2");
    EXPECT_EQ(spec.runs, 30);
    EXPECT_DOUBLE_EQ(spec.detect_prob, 0.9);
    EXPECT_EQ(spec.filters.size(), 4u);
}

TEST(ParseExperiment, Overrides) {
    const std::string text = kMinimal +
                             "model:\n  detect_prob: 0.8\n"
                             "sweep:\n  window_lengths: [3, 4]\n  full_probs: [0.5]\n  clutter_rates: [2]\n"
                             "filters: [tm-pmb, pmb]\nruns: 5\nseed: 9\ntiming: false\n";
    const auto spec = parse_experiment(text, ".", "mem.yaml");
    EXPECT_DOUBLE_EQ(spec.detect_prob, 0.8);
    EXPECT_EQ(spec.window_lengths, (std::vector<int>{3, 4}));
    EXPECT_EQ(spec.cells().size(), 2u);
    EXPECT_EQ(spec.filters, (std::vector<FilterKind>{FilterKind::TmPmb, FilterKind::Pmb}));
    EXPECT_EQ(spec.runs, 5);
    EXPECT_EQ(spec.seed, 9u);
    EXPECT_FALSE(spec.record_timing);
}

TEST(ParseExperiment, Scenario1LoadsFixture) {
    const std::string text = std::string("scenario:\n  name: scenario1\n  truth_file: ") + TMPMBM_FIXTURE_PATH + "\n";
    const auto spec = parse_experiment(text, ".", "mem.yaml");
    ASSERT_TRUE(spec.scenario.fixed_truth.has_value());
    EXPECT_EQ(spec.scenario.fixed_truth->tracks.size(), 4u);
}

TEST(ParseExperiment, ErrorsCarryLocation) {
    try {
        (void)parse_experiment("scenario:\n  name: nowhere\n", ".", "bad.yaml");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("bad.yaml:2:", 0), 0u) << e.what();
    }
}

TEST(ParseExperiment, UnknownKeyRejected) {
    try {
        (void)parse_experiment(kMinimal + "runz: 3\n", ".", "bad.yaml");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.yaml:3:"), std::string::npos) << e.what();
    }
}

TEST(ParseExperiment, InvalidValuesRejected) {
    EXPECT_THROW((void)parse_experiment(kMinimal + "model:\n  detect_prob: 1.5\n", ".", "m"), ConfigError);
    EXPECT_THROW((void)parse_experiment(kMinimal + "filters: [gm-phd]\n", ".", "m"), ConfigError);
    EXPECT_THROW((void)parse_experiment(kMinimal + "runs: abc\n", ".", "m"), ConfigError);
    EXPECT_THROW((void)parse_experiment("scenario: [\n", ".", "m"), ConfigError);
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(10.0), "10");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, Headers) {
    std::ostringstream results, summary, hyp, timing, meas;
    write_results_csv(results, {});
    write_summary_csv(summary, {});
    write_hypotheses_csv(hyp, {});
    write_timing_csv(timing, {});
    write_measurements_csv(meas, {});
    EXPECT_EQ(first_line(results.str()),
              "filter,N_w,p_full,clutter_rate,run,window,gospa_total,gospa_loc,gospa_missed,gospa_false,"
              "n_local_hypo,n_global_hypo,step_ms");
    EXPECT_EQ(first_line(summary.str()),
              "filter,N_w,p_full,clutter_rate,runs,rms_gospa_total,rms_gospa_loc,rms_gospa_missed,rms_gospa_false");
    EXPECT_EQ(first_line(hyp.str()),
              "filter,N_w,p_full,clutter_rate,mean_local_hypo,mean_global_hypo,max_local_hypo,max_global_hypo");
    EXPECT_EQ(first_line(timing.str()), "filter,N_w,p_full,clutter_rate,mean_step_ms,mean_run_s");
    EXPECT_EQ(first_line(meas.str()), "window,kind,z1_x,z1_y,z2_x,z2_y");
}

TEST(Csv, ResultRow) {
    WindowRecord r;
    r.filter = FilterKind::Pmb;
    r.cell = {7, 0.7, 10.0};
    r.run = 2;
    r.window = 5;
    r.gospa.total = 1.5;
    r.counts = {3, 1};
    std::ostringstream out;
    write_results_csv(out, {r});
    const std::string text = out.str();
    const std::string row = text.substr(text.find('\n') + 1);
    EXPECT_EQ(row.rfind("pmb,7,0.7,10,2,5,1.5,", 0), 0u) << row;
}

TEST(Csv, MeasurementRowsLeaveAbsentEndsEmpty) {
    std::ostringstream out;
    write_measurements_csv(out, {{TrajectoryMeasurement::last_only(Eigen::Vector2d(1.5, 2.0))}});
    const std::string text = out.str();
    const std::string row = first_line(text.substr(text.find('\n') + 1));
    EXPECT_NE(row.find(",,"), std::string::npos) << row;
}
