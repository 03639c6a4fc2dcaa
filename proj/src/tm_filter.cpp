#include "tmpmbm/tm_filter.hpp"

#include "tmpmbm/assignment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tmpmbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Missed-detection log weights below this only affect the Murty ordering, never the weights.
constexpr double kLogFloor = -700.0;

TrajectoryKind kind_of(DensityForm form) {
    switch (form) {
        case DensityForm::BornAtEnd: return TrajectoryKind::BornAtEnd;
        case DensityForm::Trajectory: return TrajectoryKind::Alive;
        case DensityForm::Target: break;
    }
    throw std::logic_error("tm-filter: target-form density where a trajectory was expected");
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// Predicted statistics of one measurement end for one object density.
struct EndStats {
    Eigen::VectorXd predicted;
    Eigen::LLT<Eigen::MatrixXd> llt;

    [[nodiscard]] double distance(const Eigen::VectorXd& z) const {
        return llt.matrixL().solve(z - predicted).squaredNorm();
    }
};

EndStats end_stats(const Gaussian& g, const LinearObservation& obs) {
    Innovation in = innovation(g, obs);
    EndStats s{std::move(in.predicted), Eigen::LLT<Eigen::MatrixXd>(in.cov)};
    if (s.llt.info() != Eigen::Success) {
        throw SingularCovarianceError("tm-filter: innovation covariance is not positive definite");
    }
    return s;
}

// Gate statistics of an object of a given trajectory kind, for each end it can be observed at.
struct ObjectGate {
    TrajectoryKind kind;
    std::optional<EndStats> first;
    std::optional<EndStats> last;
};

ObjectGate make_gate(const Gaussian& g, TrajectoryKind kind, const MeasurementModel& mm) {
    ObjectGate out{kind, std::nullopt, std::nullopt};
    if (mm.detection_probability(kind) <= 0.0) return out;
    if (kind != TrajectoryKind::BornAtEnd) {
        out.first = end_stats(g, observation_matrix(mm, MeasurementKind::FirstOnly, kind));
    }
    if (kind != TrajectoryKind::DiedInWindow) {
        out.last = end_stats(g, observation_matrix(mm, MeasurementKind::LastOnly, kind));
    }
    return out;
}

bool passes(const ObjectGate& g, const TrajectoryMeasurement& z, const MeasurementModel& mm,
            double threshold) {
    if (mm.kind_factor(z.kind(), g.kind) <= 0.0) return false;
    if (z.z_first() && g.first && g.first->distance(*z.z_first()) <= threshold) return true;
    if (z.z_last() && g.last && g.last->distance(*z.z_last()) <= threshold) return true;
    return false;
}

struct HypothesisGate {
    std::optional<ObjectGate> died;
    std::optional<ObjectGate> alive;
};

HypothesisGate make_gate(const LocalHypothesis& h, const MeasurementModel& mm) {
    HypothesisGate out;
    if (h.beta[0] > 0.0) out.died = make_gate(h.died, TrajectoryKind::DiedInWindow, mm);
    if (h.beta[1] > 0.0) out.alive = make_gate(h.state, TrajectoryKind::Alive, mm);
    return out;
}

bool passes(const HypothesisGate& g, const TrajectoryMeasurement& z, const MeasurementModel& mm,
            double threshold) {
    return (g.alive && passes(*g.alive, z, mm, threshold)) ||
           (g.died && passes(*g.died, z, mm, threshold));
}

void require_trajectory(const LocalHypothesis& hyp, const char* who) {
    if (hyp.form != DensityForm::Trajectory) {
        throw std::logic_error(std::string(who) + ": hypothesis is not a two-step trajectory");
    }
}

}  // namespace

// ---- Prediction ----

PmbmState predict(const PmbmState& posterior, const FilterConfig& cfg) {
    if (posterior.form != StateForm::Target) {
        throw std::logic_error("predict: posterior must be in target form");
    }
    const double ps = cfg.motion.survival;
    PmbmState out;
    out.form = StateForm::Trajectory;
    out.globals = posterior.globals;

    for (const auto& b : cfg.birth.components) {
        out.poisson.push_back({b.weight, DensityForm::BornAtEnd, b.gaussian});
    }
    for (const auto& c : posterior.poisson) {
        out.poisson.push_back({c.weight * ps, DensityForm::Trajectory,
                               predict_two_step(c.gaussian, cfg.motion.F, cfg.motion.Q)});
    }

    out.targets.reserve(posterior.targets.size());
    for (const auto& hyps : posterior.targets) {
        std::vector<LocalHypothesis> next;
        next.reserve(hyps.size());
        for (const auto& h : hyps) {
            LocalHypothesis p;
            p.log_weight = 0.0;
            p.existence = h.existence;
            p.form = DensityForm::Trajectory;
            p.beta = {1.0 - ps, ps};
            p.died = h.state;
            p.state = predict_two_step(h.state, cfg.motion.F, cfg.motion.Q);
            next.push_back(std::move(p));
        }
        out.targets.push_back(std::move(next));
    }
    return out;
}

// ---- Update ----

std::vector<PoissonComponent> update_poisson(std::vector<PoissonComponent> predicted,
                                             const FilterConfig& cfg) {
    for (auto& c : predicted) {
        c.weight *= 1.0 - cfg.meas.detection_probability(kind_of(c.form));
    }
    return predicted;
}

LocalHypothesis update_bernoulli_missed(const LocalHypothesis& hyp, const FilterConfig& cfg) {
    require_trajectory(hyp, "update_bernoulli_missed");
    const double q1 = cfg.meas.detection_probability(TrajectoryKind::DiedInWindow);
    const double q2 = cfg.meas.detection_probability(TrajectoryKind::Alive);
    const double detect = hyp.beta[0] * q1 + hyp.beta[1] * q2;
    const double w = 1.0 - hyp.existence * detect;

    LocalHypothesis out = hyp;
    out.log_weight = safe_log(w);
    out.existence = w > 0.0 ? hyp.existence * (1.0 - detect) / w : 0.0;
    if (q1 != q2) {
        const double b1 = hyp.beta[0] * (1.0 - q1);
        const double b2 = hyp.beta[1] * (1.0 - q2);
        if (b1 + b2 > 0.0) out.beta = {b1 / (b1 + b2), b2 / (b1 + b2)};
    }
    return out;
}

std::optional<LocalHypothesis> update_bernoulli_detection(const LocalHypothesis& hyp,
                                                          const TrajectoryMeasurement& z,
                                                          const FilterConfig& cfg) {
    require_trajectory(hyp, "update_bernoulli_detection");
    const auto& mm = cfg.meas;
    const double f1 = hyp.beta[0] * mm.detection_probability(TrajectoryKind::DiedInWindow) *
                      mm.kind_factor(z.kind(), TrajectoryKind::DiedInWindow);
    const double f2 = hyp.beta[1] * mm.detection_probability(TrajectoryKind::Alive) *
                      mm.kind_factor(z.kind(), TrajectoryKind::Alive);
    if (!(hyp.existence > 0.0) || !(f1 + f2 > 0.0)) return std::nullopt;

    const Eigen::VectorXd zv = z.stacked();
    LocalHypothesis out;
    out.existence = 1.0;
    out.form = DensityForm::Trajectory;
    out.died = hyp.died;
    out.state = hyp.state;
    double log_lik = 0.0;
    if (f2 > 0.0) {
        auto res = kalman_update(hyp.state, observation_matrix(mm, z.kind(), TrajectoryKind::Alive), zv);
        out.state = std::move(res.posterior);
        log_lik = res.log_likelihood;
    }
    if (f1 > 0.0) {
        auto res = kalman_update(hyp.died,
                                 observation_matrix(mm, z.kind(), TrajectoryKind::DiedInWindow), zv);
        out.died = std::move(res.posterior);
        if (!(f2 > 0.0)) log_lik = res.log_likelihood;
    }
    out.beta = {f1 / (f1 + f2), f2 / (f1 + f2)};
    out.log_weight = std::log(hyp.existence) + std::log(f1 + f2) + log_lik;
    return out;
}

bool gate_hypothesis(const LocalHypothesis& hyp, const TrajectoryMeasurement& z,
                     const FilterConfig& cfg) {
    require_trajectory(hyp, "gate_hypothesis");
    return passes(make_gate(hyp, cfg.meas), z, cfg.meas, cfg.thresholds.gate);
}

std::vector<std::size_t> gate_poisson(std::span<const PoissonComponent> predicted,
                                      const TrajectoryMeasurement& z, const FilterConfig& cfg) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < predicted.size(); ++q) {
        const auto g = make_gate(predicted[q].gaussian, kind_of(predicted[q].form), cfg.meas);
        if (passes(g, z, cfg.meas, cfg.thresholds.gate)) out.push_back(q);
    }
    return out;
}

NewBernoulli create_new_bernoulli(std::span<const PoissonComponent> predicted,
                                  const TrajectoryMeasurement& z, const FilterConfig& cfg,
                                  std::span<const std::size_t> components) {
    const auto& mm = cfg.meas;
    const Eigen::VectorXd zv = z.stacked();

    NewBernoulli out;
    out.missed.log_weight = 0.0;
    out.missed.existence = 0.0;

    double total = 0.0;
    double best_v = -1.0;
    std::optional<KalmanResult> best;
    TrajectoryKind best_kind = TrajectoryKind::Alive;
    for (const std::size_t q : components) {
        const auto& c = predicted[q];
        const TrajectoryKind kind = kind_of(c.form);
        const double factor = c.weight * mm.detection_probability(kind) * mm.kind_factor(z.kind(), kind);
        if (!(factor > 0.0)) continue;
        auto res = kalman_update(c.gaussian, observation_matrix(mm, z.kind(), kind), zv);
        const double v = factor * res.likelihood();
        total += v;
        // On ties the alive component wins.
        if (v > best_v || (v == best_v && kind == TrajectoryKind::Alive)) {
            best_v = v;
            best = std::move(res);
            best_kind = kind;
        }
    }

    const double w = clutter_intensity(cfg.clutter, z) + total;
    auto& det = out.detection;
    det.log_weight = safe_log(w);
    det.existence = w > 0.0 ? total / w : 0.0;
    if (best && total > 0.0) {
        if (best_kind == TrajectoryKind::BornAtEnd) {
            det.form = DensityForm::BornAtEnd;
            det.state = std::move(best->posterior);
        } else {
            det.form = DensityForm::Trajectory;
            det.beta = {0.0, 1.0};
            const Eigen::Index nx = best->posterior.dim() / 2;
            det.died = marginal_block(best->posterior, 0, nx);
            det.state = std::move(best->posterior);
        }
    } else {
        det.existence = 0.0;
    }
    return out;
}

PmbmState update(const PmbmState& predicted, const MeasurementSet& measurements,
                 const FilterConfig& cfg) {
    if (predicted.form != StateForm::Trajectory) {
        throw std::logic_error("update: predicted state must be in trajectory form");
    }
    const auto& mm = cfg.meas;
    const double gate_thr = cfg.thresholds.gate;
    const std::size_t n = predicted.targets.size();
    const std::size_t m = measurements.size();

    PmbmState out;
    out.form = StateForm::Trajectory;
    out.poisson = update_poisson(predicted.poisson, cfg);
    out.targets.resize(n + m);

    // ---- New potential targets, one per measurement ----
    std::vector<ObjectGate> ppp_gates;
    ppp_gates.reserve(predicted.poisson.size());
    for (const auto& c : predicted.poisson) {
        ppp_gates.push_back(make_gate(c.gaussian, kind_of(c.form), mm));
    }
    std::vector<double> new_logw(m, kNegInf);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::size_t> gated;
        for (std::size_t q = 0; q < ppp_gates.size(); ++q) {
            if (passes(ppp_gates[q], measurements[j], mm, gate_thr)) gated.push_back(q);
        }
        if (gated.empty() && !(clutter_intensity(cfg.clutter, measurements[j]) > 0.0)) {
            for (std::size_t q = 0; q < ppp_gates.size(); ++q) gated.push_back(q);
        }
        auto nb = create_new_bernoulli(predicted.poisson, measurements[j], cfg, gated);
        new_logw[j] = nb.detection.log_weight;
        if (nb.detection.existence > 0.0) out.targets[n + j].push_back(std::move(nb.detection));
    }

    // ---- Existing potential targets ----
    struct Branches {
        int missed = kAbsent;
        double missed_logw = kNegInf;
        std::vector<int> detected;         // per measurement, or kAbsent
        std::vector<double> detected_logw;
    };
    std::vector<std::vector<Branches>> branches(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& hyps = predicted.targets[i];
        auto& dst = out.targets[i];
        branches[i].resize(hyps.size());
        for (std::size_t a = 0; a < hyps.size(); ++a) {
            auto& b = branches[i][a];
            auto missed = update_bernoulli_missed(hyps[a], cfg);
            b.missed_logw = missed.log_weight;
            b.missed = static_cast<int>(dst.size());
            dst.push_back(std::move(missed));
            b.detected.assign(m, kAbsent);
            b.detected_logw.assign(m, kNegInf);
            if (!(hyps[a].existence > 0.0)) continue;
            const HypothesisGate g = make_gate(hyps[a], mm);
            for (std::size_t j = 0; j < m; ++j) {
                if (!passes(g, measurements[j], mm, gate_thr)) continue;
                auto det = update_bernoulli_detection(hyps[a], measurements[j], cfg);
                if (!det || !std::isfinite(det->log_weight)) continue;
                b.detected[j] = static_cast<int>(dst.size());
                b.detected_logw[j] = det->log_weight;
                dst.push_back(std::move(*det));
            }
        }
    }

    // ---- Global hypotheses ----
    std::vector<double> log_weights;
    std::vector<std::vector<int>> assignments;
    for (const auto& g : predicted.globals) {
        if (!(g.weight > 0.0)) continue;
        std::vector<const Branches*> chosen(n, nullptr);
        for (std::size_t i = 0; i < n; ++i) {
            const int a = g.assignment[i];
            if (a != kAbsent) chosen[i] = &branches[i][static_cast<std::size_t>(a)];
        }

        // Measurements that can only start a new target are settled outside the assignment.
        std::vector<std::size_t> rows;
        std::vector<std::size_t> cols;
        std::vector<char> col_used(n, 0);
        bool feasible = true;
        for (std::size_t j = 0; j < m; ++j) {
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i] && chosen[i]->detected[j] != kAbsent) {
                    any = true;
                    col_used[i] = 1;
                }
            }
            if (any) {
                rows.push_back(j);
            } else if (!std::isfinite(new_logw[j])) {
                feasible = false;
            }
        }
        if (!feasible) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (col_used[i]) cols.push_back(i);
        }

        const auto nr = static_cast<Eigen::Index>(rows.size());
        const auto nc = static_cast<Eigen::Index>(cols.size());
        CostMatrix cost = CostMatrix::Constant(nr, nc + nr, kForbidden);
        for (Eigen::Index r = 0; r < nr; ++r) {
            const std::size_t j = rows[static_cast<std::size_t>(r)];
            for (Eigen::Index c = 0; c < nc; ++c) {
                const Branches& b = *chosen[cols[static_cast<std::size_t>(c)]];
                if (b.detected[j] == kAbsent) continue;
                cost(r, c) = -(b.detected_logw[j] - std::max(b.missed_logw, kLogFloor));
            }
            if (std::isfinite(new_logw[j])) cost(r, nc + r) = -new_logw[j];
        }

        const auto k = static_cast<std::size_t>(
            std::max(1.0, std::ceil(g.weight * static_cast<double>(cfg.thresholds.max_globals))));
        std::vector<Assignment> solutions;
        try {
            solutions = murty_kbest(cost, k);
        } catch (const InfeasibleAssignmentError&) {
            continue;
        }

        for (const auto& sol : solutions) {
            std::vector<int> detected_by(n, -1);
            std::vector<char> starts_new(m, 1);
            for (Eigen::Index r = 0; r < nr; ++r) {
                const int c = sol.columns[static_cast<std::size_t>(r)];
                if (c < nc) {
                    detected_by[cols[static_cast<std::size_t>(c)]] =
                        static_cast<int>(rows[static_cast<std::size_t>(r)]);
                    starts_new[rows[static_cast<std::size_t>(r)]] = 0;
                }
            }
            std::vector<int> assignment(n + m, kAbsent);
            double logw = std::log(g.weight);
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) continue;
                if (detected_by[i] >= 0) {
                    const auto j = static_cast<std::size_t>(detected_by[i]);
                    assignment[i] = chosen[i]->detected[j];
                    logw += chosen[i]->detected_logw[j];
                } else {
                    assignment[i] = chosen[i]->missed;
                    logw += chosen[i]->missed_logw;
                }
            }
            for (std::size_t j = 0; j < m; ++j) {
                if (!starts_new[j]) continue;
                logw += new_logw[j];
                if (!out.targets[n + j].empty()) assignment[n + j] = 0;
            }
            if (!std::isfinite(logw)) continue;
            log_weights.push_back(logw);
            assignments.push_back(std::move(assignment));
        }
    }

    if (log_weights.empty()) {
        throw EmptyPosteriorError("update: no global hypothesis has positive weight");
    }
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    out.globals.clear();
    for (std::size_t h = 0; h < log_weights.size(); ++h) {
        out.globals.push_back({std::exp(log_weights[h] - top), std::move(assignments[h])});
    }
    return normalize_and_prune(std::move(out), cfg.thresholds);
}

// ---- Marginalisation ----

PmbmState marginalise(const PmbmState& updated) {
    if (updated.form != StateForm::Trajectory) {
        throw std::logic_error("marginalise: state must be in trajectory form");
    }
    PmbmState out;
    out.form = StateForm::Target;
    out.globals = updated.globals;

    out.poisson.reserve(updated.poisson.size());
    for (const auto& c : updated.poisson) {
        if (c.form == DensityForm::Trajectory) {
            const Eigen::Index nx = c.gaussian.dim() / 2;
            out.poisson.push_back({c.weight, DensityForm::Target, marginal_block(c.gaussian, nx, nx)});
        } else if (c.form == DensityForm::BornAtEnd) {
            out.poisson.push_back({c.weight, DensityForm::Target, c.gaussian});
        } else {
            throw std::logic_error("marginalise: target-form Poisson component");
        }
    }

    out.targets.reserve(updated.targets.size());
    for (const auto& hyps : updated.targets) {
        std::vector<LocalHypothesis> next;
        next.reserve(hyps.size());
        for (const auto& h : hyps) {
            LocalHypothesis t;
            t.log_weight = h.log_weight;
            t.form = DensityForm::Target;
            if (h.form == DensityForm::Trajectory) {
                const Eigen::Index nx = h.state.dim() / 2;
                t.existence = h.existence * h.beta[1];
                t.state = marginal_block(h.state, nx, nx);
            } else if (h.form == DensityForm::BornAtEnd) {
                t.existence = h.existence;
                t.state = h.state;
            } else {
                throw std::logic_error("marginalise: target-form local hypothesis");
            }
            next.push_back(std::move(t));
        }
        out.targets.push_back(std::move(next));
    }
    return out;
}

// ---- Full recursion ----

StepResult step(const PmbmState& posterior, const MeasurementSet& measurements,
                const FilterConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    StepResult out;
    PmbmState updated = update(predict(posterior, cfg), measurements, cfg);
    out.diagnostics.updated = hypothesis_counts(updated);
    if (cfg.variant == Variant::Pmb) updated = kld_merge_to_pmb(updated);
    out.posterior = normalize_and_prune(marginalise(updated), cfg.thresholds);
    out.estimates = estimate(out.posterior, cfg.thresholds.estimate_existence);
    out.diagnostics.posterior = hypothesis_counts(out.posterior);
    out.diagnostics.step_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace tmpmbm
