#include "tmpmbm/validation.hpp"

#include "tmpmbm/baseline.hpp"
#include "tmpmbm/oracles.hpp"
#include "tmpmbm/simulation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace tmpmbm {

namespace {

using Clock = std::chrono::steady_clock;

SuiteResult finish(std::string name, Clock::time_point start, const std::string& failure) {
    SuiteResult r;
    r.name = std::move(name);
    r.passed = failure.empty();
    r.detail = failure;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool symmetric_psd(const Eigen::MatrixXd& p) {
    const double scale = std::max(1.0, max_abs(p));
    if (max_abs(p - p.transpose()) > 1e-12 * scale) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -1e-9 * scale;
}

// Deterministic single-target truth: one state per fine step over `windows` windows.
std::vector<Eigen::VectorXd> single_track(int fine_steps, Rng& rng) {
    const MotionModel fine = MotionModel::nearly_constant_velocity(0.2, 0.01, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::MatrixXd L = fine.Q.llt().matrixL();
    std::vector<Eigen::VectorXd> xs;
    Eigen::VectorXd x(4);
    x << 20.0, 1.0, 30.0, 0.5;
    xs.push_back(x);
    for (int s = 1; s <= fine_steps; ++s) {
        Eigen::VectorXd e(4);
        for (int i = 0; i < 4; ++i) e(i) = normal(rng);
        xs.push_back(fine.F * xs.back() + L * e);
    }
    return xs;
}

Eigen::VectorXd noisy(const Eigen::VectorXd& z, double sigma2, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
    Eigen::VectorXd out = z;
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += normal(rng);
    return out;
}

Gaussian kalman_prior() {
    Eigen::VectorXd m(4);
    m << 21.0, 0.0, 29.0, 0.0;
    Eigen::VectorXd sd(4);
    sd << 5.0, 1.0, 5.0, 1.0;
    return {m, sd.array().square().matrix().asDiagonal()};
}

FilterConfig unit_detection_config(int window_length) {
    FilterConfig cfg;
    cfg.motion = MotionModel::for_window(WindowClock(window_length, 0.2), 0.01, 1.0);
    cfg.meas = MeasurementModel::position_2d(0.1, 1.0, 1.0);
    cfg.clutter = ClutterModel::equal_split(0.0, Box::rectangle(-1e4, 1e4, -1e4, 1e4));
    cfg.thresholds.gate = std::numeric_limits<double>::infinity();
    return cfg;
}

std::string compare_to_oracle(const PmbmState& posterior, const Gaussian& expected, int window) {
    std::ostringstream os;
    if (posterior.globals.size() != 1 || posterior.targets.size() != 1 ||
        posterior.targets.front().size() != 1) {
        os << "window " << window << ": expected one target with one hypothesis";
        return os.str();
    }
    const Gaussian got = posterior.targets.front().front().current_state();
    const double dm = max_abs(got.mean - expected.mean);
    const double dp = max_abs(got.cov - expected.cov);
    if (dm > 1e-9 || dp > 1e-9) {
        os << "window " << window << ": mean diff " << dm << ", cov diff " << dp;
        return os.str();
    }
    return {};
}

// A randomised filter configuration and truth for invariant checks.
struct RandomCase {
    FilterConfig cfg;
    GroundTruth truth;
    std::vector<int> bounds;
};

RandomCase random_case(std::uint64_t seed, Variant variant) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int nw_options[] = {2, 5, 7, 10};
    ExperimentSpec spec;
    spec.scenario = scenario1(scenario1_truth(seed));
    spec.detect_prob = 0.6 + 0.39 * u(rng);
    SweepCell cell;
    cell.window_length = nw_options[static_cast<int>(u(rng) * 4.0) % 4];
    cell.full_prob = 0.5 + 0.5 * u(rng);
    cell.clutter_rate = 0.5 + 14.5 * u(rng);
    RandomCase c{make_filter_config(spec, cell, variant), *spec.scenario.fixed_truth,
                 window_boundaries(spec.scenario.n_fine_steps, cell.window_length)};
    return c;
}

std::string check_state(const PmbmState& s, const char* where) {
    std::ostringstream os;
    double total = 0.0;
    for (const auto& g : s.globals) total += g.weight;
    if (std::abs(total - 1.0) > 1e-12) {
        os << where << ": global weights sum to " << total;
        return os.str();
    }
    for (const auto& c : s.poisson) {
        if (!symmetric_psd(c.gaussian.cov)) return std::string(where) + ": Poisson covariance not PSD";
    }
    for (const auto& hyps : s.targets) {
        for (const auto& h : hyps) {
            if (!(h.existence >= 0.0 && h.existence <= 1.0)) {
                os << where << ": existence " << h.existence << " outside [0,1]";
                return os.str();
            }
            if (h.form == DensityForm::Trajectory) {
                if (std::abs(h.beta[0] + h.beta[1] - 1.0) > 1e-12) {
                    return std::string(where) + ": beta does not sum to one";
                }
                if (!symmetric_psd(h.died.cov)) return std::string(where) + ": covariance not PSD";
            }
            if (!symmetric_psd(h.state.cov)) return std::string(where) + ": covariance not PSD";
        }
    }
    return {};
}

std::string check_poisson_update(const PmbmState& predicted, const PmbmState& updated,
                                 const FilterConfig& cfg) {
    std::size_t next = 0;
    for (const auto& c : predicted.poisson) {
        const TrajectoryKind kind =
            c.form == DensityForm::BornAtEnd ? TrajectoryKind::BornAtEnd : TrajectoryKind::Alive;
        const double expected = c.weight * (1.0 - cfg.meas.detection_probability(kind));
        if (expected < cfg.thresholds.poisson) continue;
        if (next >= updated.poisson.size()) return "updated Poisson component missing";
        const auto& got = updated.poisson[next++];
        if (got.weight != expected || got.gaussian.mean != c.gaussian.mean ||
            got.gaussian.cov != c.gaussian.cov) {
            return "updated Poisson component is not (1 - p^D) times the predicted one";
        }
    }
    if (next != updated.poisson.size()) return "unexpected updated Poisson component";
    return {};
}

std::string check_marginal(const PmbmState& updated, const PmbmState& marginal) {
    for (std::size_t i = 0; i < updated.targets.size(); ++i) {
        for (std::size_t a = 0; a < updated.targets[i].size(); ++a) {
            const auto& h = updated.targets[i][a];
            const double expected = h.form == DensityForm::Trajectory ? h.existence * h.beta[1] : h.existence;
            if (marginal.targets[i][a].existence != expected) return "marginal existence is not r beta(2)";
        }
    }
    for (std::size_t g = 0; g < updated.globals.size(); ++g) {
        double before = 0.0;
        double after = 0.0;
        for (std::size_t i = 0; i < updated.targets.size(); ++i) {
            const int a = updated.globals[g].assignment[i];
            if (a == kAbsent) continue;
            before += updated.targets[i][static_cast<std::size_t>(a)].existence;
            after += marginal.targets[i][static_cast<std::size_t>(a)].existence;
        }
        if (after > before) return "marginalisation increased the expected number of targets";
    }
    return {};
}

// Largest difference between two target-form PMB densities with matching structure.
double pmb_difference(const PmbmState& a, const PmbmState& b) {
    if (a.targets.size() != b.targets.size() || a.poisson.size() != b.poisson.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double diff = 0.0;
    for (std::size_t q = 0; q < a.poisson.size(); ++q) {
        diff = std::max({diff, std::abs(a.poisson[q].weight - b.poisson[q].weight),
                         max_abs(a.poisson[q].gaussian.mean - b.poisson[q].gaussian.mean),
                         max_abs(a.poisson[q].gaussian.cov - b.poisson[q].gaussian.cov)});
    }
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
        if (a.targets[i].size() != 1 || b.targets[i].size() != 1) return std::numeric_limits<double>::infinity();
        const auto& x = a.targets[i].front();
        const auto& y = b.targets[i].front();
        diff = std::max({diff, std::abs(x.existence - y.existence), max_abs(x.state.mean - y.state.mean),
                         max_abs(x.state.cov - y.state.cov)});
    }
    return diff;
}

}  // namespace

SuiteResult check_murty(int trials, int max_dim, const ValidationOptions& opt) {
    const auto start = Clock::now();
    Rng rng(opt.seed);
    std::uniform_int_distribution<int> dim(1, max_dim);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    for (int t = 0; t < trials; ++t) {
        const int n = dim(rng);
        const int m = std::uniform_int_distribution<int>(n, max_dim)(rng);
        CostMatrix cost(n, m);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) cost(i, j) = value(rng);
        }
        const auto expected = oracle::all_assignments(cost);
        auto got = murty_kbest(cost, expected.size());
        if (opt.inject_fault && t == 0) got.front().cost += 1e-6;
        if (got.size() != expected.size()) return finish("murty-bruteforce", start, "solution count differs");
        for (std::size_t h = 0; h < got.size(); ++h) {
            if (std::abs(got[h].cost - expected[h].cost) > 1e-12) {
                std::ostringstream os;
                os << "trial " << t << " rank " << h << ": cost " << got[h].cost << " vs " << expected[h].cost;
                return finish("murty-bruteforce", start, os.str());
            }
            if (got[h].columns != expected[h].columns) {
                // Equal-cost solutions may legitimately swap ranks.
                if (h + 1 < got.size() && std::abs(expected[h].cost - expected[h + 1].cost) <= 1e-12) continue;
                if (h > 0 && std::abs(expected[h].cost - expected[h - 1].cost) <= 1e-12) continue;
                std::ostringstream os;
                os << "trial " << t << " rank " << h << ": ordering differs";
                return finish("murty-bruteforce", start, os.str());
            }
        }
    }
    return finish("murty-bruteforce", start, {});
}

SuiteResult check_gospa(int trials, int max_size, const ValidationOptions& opt) {
    const auto start = Clock::now();
    const std::vector<Eigen::VectorXd> empty;
    if (gospa(empty, empty).total != 0.0) return finish("gospa-bruteforce", start, "empty sets not zero");
    const std::vector<Eigen::VectorXd> one{Eigen::Vector2d(1.0, 2.0)};
    if (std::abs(gospa(one, empty).total - std::sqrt(50.0)) > 1e-12) {
        return finish("gospa-bruteforce", start, "one missed target is not sqrt(50)");
    }
    Rng rng(opt.seed + 1);
    std::uniform_int_distribution<int> size(0, max_size);
    // Points on a region comparable to the cut-off so that both matched and unmatched pairs occur.
    std::uniform_real_distribution<double> coord(0.0, 25.0);
    for (int t = 0; t < trials; ++t) {
        std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(size(rng)));
        std::vector<Eigen::VectorXd> y(static_cast<std::size_t>(size(rng)));
        for (auto& v : x) v = Eigen::Vector2d(coord(rng), coord(rng));
        for (auto& v : y) v = Eigen::Vector2d(coord(rng), coord(rng));
        const double expected = oracle::gospa_brute_force(x, y, 10.0, 2.0);
        double got = gospa(x, y).total;
        if (opt.inject_fault && t == 0) got += 1e-6;
        if (std::abs(got - expected) > 1e-12) {
            std::ostringstream os;
            os << "trial " << t << ": " << got << " vs brute force " << expected;
            return finish("gospa-bruteforce", start, os.str());
        }
    }
    return finish("gospa-bruteforce", start, {});
}

SuiteResult check_kalman(int windows, const ValidationOptions& opt) {
    const auto start = Clock::now();
    constexpr int kNw = 5;
    Rng rng(opt.seed + 2);
    const auto xs = single_track(windows * kNw, rng);
    FilterConfig cfg = unit_detection_config(kNw);

    std::vector<Eigen::VectorXd> z_first;
    std::vector<Eigen::VectorXd> z_last;
    std::vector<MeasurementSet> sets;
    for (int k = 0; k < windows; ++k) {
        z_first.push_back(noisy(cfg.meas.H * xs[static_cast<std::size_t>(k * kNw)], 0.1, rng));
        z_last.push_back(noisy(cfg.meas.H * xs[static_cast<std::size_t>((k + 1) * kNw)], 0.1, rng));
        sets.push_back({TrajectoryMeasurement::full(z_first.back(), z_last.back())});
    }
    const Gaussian prior = kalman_prior();
    const auto expected = oracle::stacked_kalman(prior, cfg.motion.F, cfg.motion.Q, cfg.meas.H,
                                                 cfg.meas.R, z_first, z_last);
    PmbmState posterior;
    posterior.poisson.push_back({1.0, DensityForm::Target, prior});
    try {
        for (int k = 0; k < windows; ++k) {
            posterior = step(posterior, sets[static_cast<std::size_t>(k)], cfg).posterior;
            if (opt.inject_fault && k == 0 && !posterior.targets.empty()) {
                posterior.targets[0][0].state.mean(0) += 1e-6;
            }
            auto failure = compare_to_oracle(posterior, expected[static_cast<std::size_t>(k)], k + 1);
            if (!failure.empty()) return finish("kalman-equivalence", start, failure);
        }
    } catch (const std::exception& e) {
        return finish("kalman-equivalence", start, e.what());
    }
    return finish("kalman-equivalence", start, {});
}

SuiteResult check_baseline_kalman(int windows, const ValidationOptions& opt) {
    const auto start = Clock::now();
    constexpr int kNw = 5;
    Rng rng(opt.seed + 3);
    const auto xs = single_track(windows * kNw, rng);
    const FilterConfig cfg = baseline_config(unit_detection_config(kNw));
    if (cfg.meas.detect_prob != 1.0) return finish("baseline-kalman", start, "window-end p^D is not one");

    std::vector<Eigen::VectorXd> z;
    for (int k = 0; k < windows; ++k) {
        z.push_back(noisy(cfg.meas.H * xs[static_cast<std::size_t>((k + 1) * kNw)], 0.1, rng));
    }
    const Gaussian prior = kalman_prior();
    const auto expected = oracle::point_kalman(prior, cfg.motion.F, cfg.motion.Q, cfg.meas.H, cfg.meas.R, z);
    PmbmState posterior;
    posterior.poisson.push_back({1.0, DensityForm::Target, prior});
    try {
        for (int k = 0; k < windows; ++k) {
            const MeasurementSet points{TrajectoryMeasurement::last_only(z[static_cast<std::size_t>(k)])};
            posterior = baseline_step(posterior, points, cfg).posterior;
            auto failure = compare_to_oracle(posterior, expected[static_cast<std::size_t>(k)], k + 1);
            if (!failure.empty()) return finish("baseline-kalman", start, failure);
        }
    } catch (const std::exception& e) {
        return finish("baseline-kalman", start, e.what());
    }
    return finish("baseline-kalman", start, {});
}

SuiteResult check_density_integral(int samples_per_kind, const ValidationOptions& opt) {
    const auto start = Clock::now();
    Rng rng(opt.seed + 4);
    for (double full : {0.7, 0.9}) {
        const auto model = MeasurementModel::position_2d(0.1, 0.9, full);
        const double analytic = model.kind_factor(MeasurementKind::Full, TrajectoryKind::Alive) +
                                model.kind_factor(MeasurementKind::FirstOnly, TrajectoryKind::Alive) +
                                model.kind_factor(MeasurementKind::LastOnly, TrajectoryKind::Alive);
        if (std::abs(analytic - 1.0) > 1e-15) {
            return finish("density-integral", start, "kind factors do not sum to one");
        }
        Eigen::VectorXd x(8);
        x << 10.0, 1.0, 20.0, -1.0, 11.0, 1.0, 19.0, -1.0;
        const double mc = oracle::measurement_density_integral(model, x, samples_per_kind, rng);
        if (std::abs(mc - 1.0) > 1e-2) {
            std::ostringstream os;
            os << "Monte Carlo integral " << mc << " for full-measurement probability " << full;
            return finish("density-integral", start, os.str());
        }
    }
    return finish("density-integral", start, {});
}

SuiteResult check_recursion_invariants(int seeds, int windows, const ValidationOptions& opt) {
    const auto start = Clock::now();
    for (int s = 0; s < seeds; ++s) {
        const auto seed = opt.seed + 100 + static_cast<std::uint64_t>(s);
        const Variant variant = s % 2 == 0 ? Variant::Pmbm : Variant::Pmb;
        RandomCase c = random_case(seed, variant);
        Rng rng(seed);
        PmbmState posterior = initial_posterior(scenario1(c.truth));
        const int n = std::min<int>(windows, static_cast<int>(c.bounds.size()) - 1);
        try {
            for (int k = 0; k < n; ++k) {
                const auto z = generate_measurements(c.truth, c.bounds[static_cast<std::size_t>(k)],
                                                     c.bounds[static_cast<std::size_t>(k) + 1], c.cfg.meas,
                                                     c.cfg.clutter, rng);
                const PmbmState predicted = predict(posterior, c.cfg);
                std::string failure = check_state(predicted, "predict");
                PmbmState updated = update(predicted, z, c.cfg);
                if (failure.empty()) failure = check_state(updated, "update");
                if (failure.empty()) failure = check_poisson_update(predicted, updated, c.cfg);
                if (failure.empty()) failure = check_marginal(updated, marginalise(updated));
                if (variant == Variant::Pmb) {
                    updated = kld_merge_to_pmb(updated);
                    if (failure.empty() && updated.globals.size() != 1) failure = "PMB has several globals";
                }
                posterior = normalize_and_prune(marginalise(updated), c.cfg.thresholds);
                if (failure.empty()) failure = check_state(posterior, "posterior");
                if (!failure.empty()) {
                    std::ostringstream os;
                    os << "seed " << seed << " window " << k + 1 << ": " << failure;
                    return finish("recursion-invariants", start, os.str());
                }
            }
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "seed " << seed << ": " << e.what();
            return finish("recursion-invariants", start, os.str());
        }
    }
    return finish("recursion-invariants", start, {});
}

SuiteResult check_order_swap(int states, const ValidationOptions& opt) {
    const auto start = Clock::now();
    int checked = 0;
    for (std::uint64_t seed = opt.seed + 1000; checked < states; ++seed) {
        RandomCase c = random_case(seed, Variant::Pmbm);
        Rng rng(seed);
        PmbmState posterior = initial_posterior(scenario1(c.truth));
        // A few windows in, so that targets carry several hypotheses.
        const std::size_t last = std::min<std::size_t>(c.bounds.size() - 1, 2 + seed % 6);
        try {
            for (std::size_t k = 0; k < last; ++k) {
                const auto z = generate_measurements(c.truth, c.bounds[k], c.bounds[k + 1], c.cfg.meas,
                                                     c.cfg.clutter, rng);
                const PmbmState updated = update(predict(posterior, c.cfg), z, c.cfg);
                if (k + 1 == last) {
                    const auto a = normalize_and_prune(marginalise(kld_merge_to_pmb(updated)), c.cfg.thresholds);
                    auto b = normalize_and_prune(kld_merge_to_pmb(marginalise(updated)), c.cfg.thresholds);
                    if (opt.inject_fault && checked == 0 && !b.poisson.empty()) b.poisson.front().weight += 1e-6;
                    const double diff = pmb_difference(a, b);
                    if (!(diff <= 1e-12)) {
                        std::ostringstream os;
                        os << "seed " << seed << ": difference " << diff;
                        return finish("order-swap", start, os.str());
                    }
                    ++checked;
                }
                posterior = normalize_and_prune(marginalise(updated), c.cfg.thresholds);
            }
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "seed " << seed << ": " << e.what();
            return finish("order-swap", start, os.str());
        }
    }
    return finish("order-swap", start, {});
}

std::vector<SuiteResult> run_validation(const ValidationOptions& opt) {
    return {check_murty(200, 4, opt),
            check_gospa(200, 5, opt),
            check_kalman(50, opt),
            check_baseline_kalman(50, opt),
            check_density_integral(100000, opt),
            check_recursion_invariants(20, 20, opt),
            check_order_swap(20, opt)};
}

}  // namespace tmpmbm
