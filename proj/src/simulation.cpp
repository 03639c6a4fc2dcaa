#include "tmpmbm/simulation.hpp"

#include "tmpmbm/baseline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tmpmbm {

namespace {

Eigen::VectorXd sample_gaussian(const Gaussian& g, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd e(g.dim());
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
    return g.mean + g.cov.llt().matrixL() * e;
}

Gaussian diagonal_gaussian(std::initializer_list<double> mean, std::initializer_list<double> sd) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(mean.size()));
    Eigen::VectorXd s(static_cast<Eigen::Index>(sd.size()));
    Eigen::Index i = 0;
    for (double v : mean) m(i++) = v;
    i = 0;
    for (double v : sd) s(i++) = v;
    return {m, s.array().square().matrix().asDiagonal()};
}

Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return Rng(seq);
}

constexpr std::uint64_t kTruthStream = 0xffffffffULL;

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TMPMBM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Eigen::VectorXd> positions(const std::vector<Eigen::VectorXd>& states,
                                       const Eigen::MatrixXd& H) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(states.size());
    for (const auto& x : states) out.emplace_back(H * x);
    return out;
}

}  // namespace

// ---- Ground truth ----

const Eigen::VectorXd& TruthTrack::state_at(int step) const {
    if (!alive_at(step)) throw std::out_of_range("TruthTrack: target not alive at requested step");
    return states[static_cast<std::size_t>(step - birth_step)];
}

std::vector<Eigen::VectorXd> GroundTruth::states_at(int step) const {
    std::vector<Eigen::VectorXd> out;
    for (const auto& t : tracks) {
        if (t.alive_at(step)) out.push_back(t.state_at(step));
    }
    return out;
}

ScenarioConfig scenario1(GroundTruth fixed_truth) {
    ScenarioConfig c;
    c.name = "scenario1";
    c.area = Box::rectangle(0.0, 100.0, 0.0, 100.0);
    c.n_fine_steps = fixed_truth.n_fine_steps;
    const Gaussian birth = diagonal_gaussian({50.0, 0.0, 50.0, 0.0}, {50.0, 1.0, 50.0, 1.0});
    c.filter_initial_birth = {3.0, birth};
    c.filter_birth = {0.005, birth};
    c.truth_birth = {0.0, birth};
    c.fixed_truth = std::move(fixed_truth);
    return c;
}

ScenarioConfig scenario2() {
    ScenarioConfig c;
    c.name = "scenario2";
    c.area = Box::rectangle(0.0, 600.0, 0.0, 400.0);
    const Gaussian prior = diagonal_gaussian({300.0, 0.0, 200.0, 0.0}, {300.0, 1.0, 200.0, 1.0});
    c.filter_initial_birth = {0.16, prior};
    c.filter_birth = {0.16, prior};
    c.truth_birth = {0.16, diagonal_gaussian({300.0, 0.0, 200.0, 0.0}, {30.0, 1.0, 30.0, 1.0})};
    c.mean_lifespan = 1000.0;
    return c;
}

GroundTruth scenario1_truth(std::uint64_t seed, int n_fine_steps) {
    constexpr int kMeet = 125;
    constexpr double kInterval = 0.2;
    constexpr double kSpeed = 1.0;
    if (n_fine_steps < kMeet) throw std::invalid_argument("scenario1_truth: horizon too short");
    Rng rng = stream(seed, 1, 0);
    const MotionModel motion = MotionModel::nearly_constant_velocity(kInterval, 0.01, 1.0);
    const Eigen::MatrixXd F_inv = motion.F.inverse();
    const Gaussian noise(Eigen::VectorXd::Zero(4), motion.Q);
    std::normal_distribution<double> jitter(0.0, 1.0);

    GroundTruth truth;
    truth.n_fine_steps = n_fine_steps;
    for (int i = 0; i < 4; ++i) {
        const double angle = std::numbers::pi / 4.0 + i * std::numbers::pi / 2.0 + 0.1 * jitter(rng);
        Eigen::VectorXd meet(4);
        meet << 50.0 + jitter(rng), kSpeed * std::cos(angle), 50.0 + jitter(rng),
            kSpeed * std::sin(angle);
        const int last = i == 0 ? kMeet : n_fine_steps;

        std::vector<Eigen::VectorXd> backward{meet};
        for (int s = kMeet; s > 1; --s) {
            backward.push_back(F_inv * (backward.back() - sample_gaussian(noise, rng)));
        }
        TruthTrack track;
        track.birth_step = 1;
        track.states.assign(backward.rbegin(), backward.rend());
        for (int s = kMeet + 1; s <= last; ++s) {
            track.states.push_back(motion.F * track.states.back() + sample_gaussian(noise, rng));
        }
        truth.tracks.push_back(std::move(track));
    }
    return truth;
}

GroundTruth generate_ground_truth(const ScenarioConfig& cfg, Rng& rng) {
    if (cfg.fixed_truth) return *cfg.fixed_truth;
    GroundTruth truth;
    truth.n_fine_steps = cfg.n_fine_steps;
    if (!(cfg.truth_birth.rate > 0.0)) return truth;

    const MotionModel motion =
        MotionModel::nearly_constant_velocity(cfg.fine_interval, cfg.process_noise, 1.0);
    const Gaussian noise(Eigen::VectorXd::Zero(motion.state_dim()), motion.Q);
    const double death = cfg.mean_lifespan > 0.0 ? std::min(1.0, cfg.fine_interval / cfg.mean_lifespan)
                                                 : 1.0;
    std::poisson_distribution<int> births(cfg.truth_birth.rate);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int s = 1; s <= cfg.n_fine_steps; ++s) {
        const int n = births(rng);
        for (int b = 0; b < n; ++b) {
            TruthTrack track;
            track.birth_step = s;
            track.states.push_back(sample_gaussian(cfg.truth_birth.gaussian, rng));
            for (int t = s + 1; t <= cfg.n_fine_steps; ++t) {
                if (uniform(rng) < death) break;
                track.states.push_back(motion.F * track.states.back() + sample_gaussian(noise, rng));
            }
            truth.tracks.push_back(std::move(track));
        }
    }
    return truth;
}

void save_truth_csv(const GroundTruth& truth, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    out << "track,step,px,vx,py,vy\n";
    for (std::size_t i = 0; i < truth.tracks.size(); ++i) {
        const auto& t = truth.tracks[i];
        for (int s = t.birth_step; s <= t.last_step(); ++s) {
            const auto& x = t.state_at(s);
            out << i << ',' << s << ',' << x(0) << ',' << x(1) << ',' << x(2) << ',' << x(3) << '\n';
        }
    }
}

GroundTruth load_truth_csv(const std::filesystem::path& path, int n_fine_steps) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    std::map<std::size_t, TruthTrack> tracks;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::size_t id = 0;
        int step = 0;
        Eigen::VectorXd x(4);
        if (!(fields >> id >> step >> x(0) >> x(1) >> x(2) >> x(3))) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        auto& t = tracks[id];
        if (t.states.empty()) {
            t.birth_step = step;
        } else if (step != t.last_step() + 1) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": steps of a track must be consecutive");
        }
        if (step < 1 || step > n_fine_steps) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": step outside the horizon");
        }
        t.states.push_back(std::move(x));
    }
    GroundTruth truth;
    truth.n_fine_steps = n_fine_steps;
    for (auto& [id, t] : tracks) truth.tracks.push_back(std::move(t));
    return truth;
}

// ---- Windows and measurements ----

std::vector<int> window_boundaries(int n_fine_steps, int fine_steps_per_window) {
    if (fine_steps_per_window < 1) throw std::invalid_argument("window length must be positive");
    std::vector<int> out;
    for (int b = 1; b <= n_fine_steps; b += fine_steps_per_window) out.push_back(b);
    return out;
}

std::vector<WindowTrajectory> window_trajectories(const GroundTruth& truth, int start_step,
                                                  int end_step) {
    std::vector<WindowTrajectory> out;
    for (std::size_t i = 0; i < truth.tracks.size(); ++i) {
        const auto& t = truth.tracks[i];
        const bool at_start = t.alive_at(start_step);
        const bool at_end = t.alive_at(end_step);
        if (at_start && at_end) {
            Eigen::VectorXd x(2 * t.states.front().size());
            x << t.state_at(start_step), t.state_at(end_step);
            out.push_back({i, TrajectoryKind::Alive, std::move(x)});
        } else if (at_start) {
            out.push_back({i, TrajectoryKind::DiedInWindow, t.state_at(start_step)});
        } else if (at_end) {
            out.push_back({i, TrajectoryKind::BornAtEnd, t.state_at(end_step)});
        }
    }
    return out;
}

MeasurementSet generate_measurements(const GroundTruth& truth, int start_step, int end_step,
                                     const MeasurementModel& meas, const ClutterModel& clutter,
                                     Rng& rng) {
    MeasurementSet out;
    for (const auto& w : window_trajectories(truth, start_step, end_step)) {
        if (auto z = sample_target_measurement(meas, w.kind, w.state, rng)) out.push_back(std::move(*z));
    }
    auto c = sample_clutter(clutter, rng);
    out.insert(out.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
    return out;
}

// ---- Monte Carlo experiments ----

std::string_view to_string(FilterKind kind) {
    switch (kind) {
        case FilterKind::TmPmbm: return "tm-pmbm";
        case FilterKind::TmPmb: return "tm-pmb";
        case FilterKind::Pmbm: return "pmbm";
        case FilterKind::Pmb: return "pmb";
    }
    return "?";
}

std::optional<FilterKind> parse_filter_kind(std::string_view text) {
    for (auto k : {FilterKind::TmPmbm, FilterKind::TmPmb, FilterKind::Pmbm, FilterKind::Pmb}) {
        if (text == to_string(k)) return k;
    }
    return std::nullopt;
}

bool uses_trajectory_measurements(FilterKind kind) {
    return kind == FilterKind::TmPmbm || kind == FilterKind::TmPmb;
}

std::vector<SweepCell> ExperimentSpec::cells() const {
    std::vector<SweepCell> out;
    for (int nw : window_lengths) {
        for (double pf : full_probs) {
            for (double lc : clutter_rates) out.push_back({nw, pf, lc});
        }
    }
    return out;
}

FilterConfig make_filter_config(const ExperimentSpec& spec, const SweepCell& cell, Variant variant) {
    const ScenarioConfig& sc = spec.scenario;
    const WindowClock clock(cell.window_length, sc.fine_interval);
    const MotionModel fine =
        MotionModel::nearly_constant_velocity(sc.fine_interval, sc.process_noise, sc.survival_per_step);
    FilterConfig cfg;
    cfg.motion = MotionModel::for_window(clock, sc.process_noise, sc.survival_per_step);
    cfg.meas = MeasurementModel::position_2d(spec.meas_noise, spec.detect_prob, cell.full_prob);
    BirthModel per_step;
    if (sc.filter_birth.rate > 0.0) per_step.components.push_back({sc.filter_birth.rate, sc.filter_birth.gaussian});
    cfg.birth = window_birth(per_step, fine, cell.window_length);
    cfg.clutter = ClutterModel::equal_split(cell.clutter_rate, sc.area);
    cfg.thresholds = spec.thresholds;
    cfg.variant = variant;
    return cfg;
}

PmbmState initial_posterior(const ScenarioConfig& scenario) {
    PmbmState state;
    if (scenario.filter_initial_birth.rate > 0.0) {
        state.poisson.push_back(
            {scenario.filter_initial_birth.rate, DensityForm::Target, scenario.filter_initial_birth.gaussian});
    }
    return state;
}

RunData simulate_run(const ExperimentSpec& spec, std::size_t cell_index, int run) {
    const auto cells = spec.cells();
    const SweepCell& cell = cells.at(cell_index);
    RunData data;
    Rng truth_rng = stream(spec.seed, kTruthStream, static_cast<std::uint64_t>(run));
    data.truth = generate_ground_truth(spec.scenario, truth_rng);
    data.bounds = window_boundaries(spec.scenario.n_fine_steps, cell.window_length);
    const FilterConfig cfg = make_filter_config(spec, cell, Variant::Pmbm);
    Rng meas_rng = stream(spec.seed, cell_index, static_cast<std::uint64_t>(run));
    for (std::size_t k = 1; k < data.bounds.size(); ++k) {
        data.windows.push_back(generate_measurements(data.truth, data.bounds[k - 1], data.bounds[k],
                                                     cfg.meas, cfg.clutter, meas_rng));
    }
    return data;
}

namespace {

struct RunOutput {
    std::vector<std::vector<WindowRecord>> per_filter;
    std::string error;
};

RunOutput run_one(const ExperimentSpec& spec, const SweepCell& cell, std::size_t cell_index, int run) {
    RunOutput out;
    out.per_filter.resize(spec.filters.size());
    const ScenarioConfig& sc = spec.scenario;
    const RunData data = simulate_run(spec, cell_index, run);
    const GroundTruth& truth = data.truth;
    const auto& bounds = data.bounds;
    const auto& windows = data.windows;
    const FilterConfig tm_cfg = make_filter_config(spec, cell, Variant::Pmbm);
    const Eigen::MatrixXd& H = tm_cfg.meas.H;

    for (std::size_t f = 0; f < spec.filters.size(); ++f) {
        const FilterKind kind = spec.filters[f];
        const Variant variant =
            kind == FilterKind::TmPmb || kind == FilterKind::Pmb ? Variant::Pmb : Variant::Pmbm;
        FilterConfig cfg = tm_cfg;
        cfg.variant = variant;
        const bool trajectory = uses_trajectory_measurements(kind);
        if (!trajectory) cfg = baseline_config(cfg);

        PmbmState posterior = initial_posterior(sc);
        try {
            for (std::size_t k = 0; k < windows.size(); ++k) {
                const MeasurementSet z = trajectory ? windows[k] : strip_measurements(windows[k]);
                StepResult res = step(posterior, z, cfg);
                WindowRecord rec;
                rec.filter = kind;
                rec.cell = cell;
                rec.run = run;
                rec.window = static_cast<int>(k) + 1;
                const auto est = positions(res.estimates, H);
                const auto gt = positions(truth.states_at(bounds[k + 1]), H);
                rec.gospa = gospa(gt, est, spec.gospa);
                rec.counts = res.diagnostics.updated;
                rec.step_ms = spec.record_timing ? res.diagnostics.step_ms : 0.0;
                out.per_filter[f].push_back(rec);
                posterior = std::move(res.posterior);
            }
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << to_string(kind) << " N_w=" << cell.window_length << " p_full=" << cell.full_prob
                << " clutter=" << cell.clutter_rate << " run=" << run << ": " << e.what();
            out.error = msg.str();
            out.per_filter.clear();
            return out;
        }
    }
    return out;
}

}  // namespace

ExperimentResults run_monte_carlo(const ExperimentSpec& spec) {
    if (spec.runs < 1) throw std::invalid_argument("run_monte_carlo: runs must be at least 1");
    const auto cells = spec.cells();
    if (cells.empty() || spec.filters.empty()) {
        throw std::invalid_argument("run_monte_carlo: empty sweep");
    }
    const std::size_t n_items = cells.size() * static_cast<std::size_t>(spec.runs);
    std::vector<RunOutput> outputs(n_items);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t item = next++; item < n_items; item = next++) {
            const std::size_t c = item / static_cast<std::size_t>(spec.runs);
            const int run = static_cast<int>(item % static_cast<std::size_t>(spec.runs));
            try {
                outputs[item] = run_one(spec, cells[c], c, run);
            } catch (const std::exception& e) {
                outputs[item].error = e.what();
            }
        }
    };
    const int n_threads = std::min<int>(thread_count(spec.threads), static_cast<int>(n_items));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ExperimentResults results;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t f = 0; f < spec.filters.size(); ++f) {
            for (int run = 0; run < spec.runs; ++run) {
                const auto& o = outputs[c * static_cast<std::size_t>(spec.runs) + static_cast<std::size_t>(run)];
                if (!o.error.empty()) continue;
                const auto& recs = o.per_filter[f];
                results.records.insert(results.records.end(), recs.begin(), recs.end());
            }
        }
    }
    for (const auto& o : outputs) {
        if (!o.error.empty()) results.errors.push_back(o.error);
    }
    results.summary = summarise(spec, results.records);
    return results;
}

std::vector<CellSummary> summarise(const ExperimentSpec& spec, const std::vector<WindowRecord>& records) {
    std::vector<CellSummary> out;
    const auto cells = spec.cells();
    for (const auto& cell : cells) {
        for (const FilterKind kind : spec.filters) {
            std::vector<GospaResult> series;
            std::vector<int> runs_seen;
            CellSummary s;
            s.filter = kind;
            s.cell = cell;
            double step_total = 0.0;
            for (const auto& r : records) {
                if (r.filter != kind || r.cell.window_length != cell.window_length ||
                    r.cell.full_prob != cell.full_prob || r.cell.clutter_rate != cell.clutter_rate) {
                    continue;
                }
                series.push_back(r.gospa);
                s.mean_local_hypotheses += static_cast<double>(r.counts.local);
                s.mean_global_hypotheses += static_cast<double>(r.counts.global);
                s.max_local_hypotheses = std::max(s.max_local_hypotheses, r.counts.local);
                s.max_global_hypotheses = std::max(s.max_global_hypotheses, r.counts.global);
                step_total += r.step_ms;
                if (std::find(runs_seen.begin(), runs_seen.end(), r.run) == runs_seen.end()) {
                    runs_seen.push_back(r.run);
                }
            }
            if (series.empty()) continue;
            const auto n = static_cast<double>(series.size());
            s.runs = static_cast<int>(runs_seen.size());
            s.rms = rms(series);
            s.mean_local_hypotheses /= n;
            s.mean_global_hypotheses /= n;
            s.mean_step_ms = step_total / n;
            s.mean_run_ms = step_total / static_cast<double>(s.runs);
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace tmpmbm
