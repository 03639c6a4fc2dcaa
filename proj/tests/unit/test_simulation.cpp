#include "tmpmbm/simulation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

using namespace tmpmbm;

namespace {

GroundTruth fixture() { return load_truth_csv(TMPMBM_FIXTURE_PATH, 250); }

TruthTrack track(int birth, int n, double x = 10.0) {
    TruthTrack t;
    t.birth_step = birth;
    for (int i = 0; i < n; ++i) t.states.push_back(Eigen::Vector4d(x + i, 1.0, 5.0, 0.0));
    return t;
}

}  // namespace

TEST(Scenario1Truth, FixtureShape) {
    const auto truth = fixture();
    ASSERT_EQ(truth.tracks.size(), 4u);
    int ending = 0;
    for (const auto& t : truth.tracks) {
        EXPECT_EQ(t.birth_step, 1);
        if (t.last_step() == 125) ++ending;
        else EXPECT_EQ(t.last_step(), 250);
    }
    EXPECT_EQ(ending, 1);
}

TEST(Scenario1Truth, TracksMeetNearCentre) {
    const auto truth = fixture();
    for (const auto& t : truth.tracks) {
        const auto& x = t.state_at(125);
        EXPECT_LT(std::hypot(x(0) - 50.0, x(2) - 50.0), 5.0);
    }
}

TEST(Scenario1Truth, FixtureMatchesGenerator) {
    const auto a = fixture();
    const auto b = scenario1_truth(20240611, 250);
    ASSERT_EQ(a.tracks.size(), b.tracks.size());
    for (std::size_t i = 0; i < a.tracks.size(); ++i) {
        ASSERT_EQ(a.tracks[i].states.size(), b.tracks[i].states.size());
        for (std::size_t s = 0; s < a.tracks[i].states.size(); ++s) {
            EXPECT_EQ(a.tracks[i].states[s], b.tracks[i].states[s]);
        }
    }
}

TEST(TruthCsv, RoundTrip) {
    GroundTruth truth;
    truth.n_fine_steps = 20;
    truth.tracks = {track(1, 20, 0.1), track(7, 3, 1.0 / 3.0)};
    const auto path = std::filesystem::temp_directory_path() / "tmpmbm_truth_roundtrip.csv";
    save_truth_csv(truth, path);
    const auto back = load_truth_csv(path, 20);
    std::filesystem::remove(path);
    ASSERT_EQ(back.tracks.size(), 2u);
    EXPECT_EQ(back.tracks[1].birth_step, 7);
    EXPECT_EQ(back.tracks[1].states, truth.tracks[1].states);
}

TEST(GroundTruth, ZeroBirthRateIsEmpty) {
    auto sc = scenario2();
    sc.truth_birth.rate = 0.0;
    Rng rng(1);
    EXPECT_TRUE(generate_ground_truth(sc, rng).tracks.empty());
}

TEST(GroundTruth, Scenario2BirthCount) {
    const auto sc = scenario2();
    double total = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(1000 + s);
        total += static_cast<double>(generate_ground_truth(sc, rng).tracks.size());
    }
    const double expected = 0.16 * sc.n_fine_steps;
    EXPECT_NEAR(total / seeds, expected, 3.0 * std::sqrt(expected / seeds));
}

TEST(Windows, Boundaries) {
    EXPECT_EQ(window_boundaries(250, 5).front(), 1);
    EXPECT_EQ(window_boundaries(250, 5).back(), 246);
    EXPECT_EQ(window_boundaries(250, 7).back(), 246);
    EXPECT_EQ(window_boundaries(21, 10), (std::vector<int>{1, 11, 21}));
    EXPECT_EQ(window_boundaries(250, 2).size(), 125u);
}

TEST(Windows, Classification) {
    GroundTruth truth;
    truth.n_fine_steps = 30;
    truth.tracks = {track(1, 30), track(1, 8), track(9, 10), track(6, 2)};
    const auto w = window_trajectories(truth, 6, 11);
    ASSERT_EQ(w.size(), 4u);
    EXPECT_EQ(w[0].kind, TrajectoryKind::Alive);
    EXPECT_EQ(w[0].state.size(), 8);
    EXPECT_EQ(w[1].kind, TrajectoryKind::DiedInWindow);
    EXPECT_EQ(w[2].kind, TrajectoryKind::BornAtEnd);
    EXPECT_EQ(w[3].kind, TrajectoryKind::DiedInWindow);
    EXPECT_EQ(w[2].state, truth.tracks[2].state_at(11));
}

TEST(Windows, BornAndDiedInsideIsInvisible) {
    GroundTruth truth;
    truth.n_fine_steps = 30;
    truth.tracks = {track(7, 3)};
    EXPECT_TRUE(window_trajectories(truth, 6, 11).empty());
}

TEST(Measurements, FullPairsBothEnds) {
    GroundTruth truth;
    truth.n_fine_steps = 30;
    truth.tracks = {track(1, 30)};
    const auto meas = MeasurementModel::position_2d(1e-12, 1.0, 1.0);
    const ClutterModel none{0.0, 0.0, Box::rectangle(0, 100, 0, 100)};
    Rng rng(3);
    const auto zs = generate_measurements(truth, 6, 11, meas, none, rng);
    ASSERT_EQ(zs.size(), 1u);
    ASSERT_EQ(zs[0].kind(), MeasurementKind::Full);
    EXPECT_NEAR((*zs[0].z_first())(0), truth.tracks[0].state_at(6)(0), 1e-4);
    EXPECT_NEAR((*zs[0].z_last())(0), truth.tracks[0].state_at(11)(0), 1e-4);
}

TEST(FilterKinds, Names) {
    for (auto k : {FilterKind::TmPmbm, FilterKind::TmPmb, FilterKind::Pmbm, FilterKind::Pmb}) {
        EXPECT_EQ(parse_filter_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_filter_kind("gm-phd").has_value());
    EXPECT_TRUE(uses_trajectory_measurements(FilterKind::TmPmb));
    EXPECT_FALSE(uses_trajectory_measurements(FilterKind::Pmbm));
}

TEST(Experiment, CellsAndFilterConfig) {
    ExperimentSpec spec;
    spec.scenario = scenario1(fixture());
    EXPECT_EQ(spec.cells().size(), 24u);
    const SweepCell cell{5, 0.7, 10.0};
    const auto cfg = make_filter_config(spec, cell, Variant::Pmbm);
    EXPECT_NEAR(cfg.motion.survival, std::pow(0.99, 5), 1e-15);
    EXPECT_NEAR(cfg.meas.gamma(), 0.15, 1e-15);
    EXPECT_NEAR(clutter_rate(cfg.clutter).total, 10.0, 1e-12);
    EXPECT_NEAR(cfg.motion.F(0, 1), 1.0, 1e-15);
}

TEST(Experiment, SimulateRunIsDeterministic) {
    ExperimentSpec spec;
    spec.scenario = scenario1(fixture());
    spec.window_lengths = {7};
    spec.full_probs = {0.7};
    spec.clutter_rates = {10.0};
    const auto a = simulate_run(spec, 0, 3);
    const auto b = simulate_run(spec, 0, 3);
    ASSERT_EQ(a.windows.size(), b.windows.size());
    EXPECT_EQ(a.windows.size(), a.bounds.size() - 1);
    for (std::size_t k = 0; k < a.windows.size(); ++k) {
        ASSERT_EQ(a.windows[k].size(), b.windows[k].size());
        for (std::size_t j = 0; j < a.windows[k].size(); ++j) {
            EXPECT_EQ(a.windows[k][j].stacked(), b.windows[k][j].stacked());
        }
    }
    const auto c = simulate_run(spec, 0, 4);
    std::size_t diff = 0;
    for (std::size_t k = 0; k < a.windows.size(); ++k) diff += a.windows[k].size() != c.windows[k].size();
    EXPECT_GT(diff, 0u);
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
    ExperimentSpec spec;
    spec.scenario = scenario1(fixture());
    spec.window_lengths = {10};
    spec.full_probs = {0.7};
    spec.clutter_rates = {1.0};
    spec.runs = 3;
    spec.record_timing = false;
    spec.threads = 1;
    const auto a = run_monte_carlo(spec);
    spec.threads = 3;
    const auto b = run_monte_carlo(spec);
    ASSERT_TRUE(a.errors.empty());
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].gospa.total, b.records[i].gospa.total);
        EXPECT_EQ(a.records[i].counts.global, b.records[i].counts.global);
    }
    ASSERT_EQ(a.summary.size(), 4u);
    EXPECT_EQ(a.summary[0].runs, 3);
}
