#include "tmpmbm/models.hpp"

#include <cmath>
#include <stdexcept>

namespace tmpmbm {

namespace {

Eigen::VectorXd sample_noise(const Eigen::MatrixXd& cov, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd e(cov.rows());
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
    return cov.llt().matrixL() * e;
}

int sample_poisson(double mean, Rng& rng) {
    return mean > 0.0 ? std::poisson_distribution<int>(mean)(rng) : 0;
}

Eigen::MatrixXd kron_identity2(const Eigen::MatrixXd& block) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * block.rows(), 2 * block.cols());
    out.topLeftCorner(block.rows(), block.cols()) = block;
    out.bottomRightCorner(block.rows(), block.cols()) = block;
    return out;
}

}  // namespace

// ---- Motion ----

MotionModel MotionModel::nearly_constant_velocity(double interval, double q, double survival) {
    if (survival < 0.0 || survival > 1.0) {
        throw std::invalid_argument("survival probability must lie in [0, 1]");
    }
    Eigen::Matrix2d f1;
    f1 << 1.0, interval, 0.0, 1.0;
    Eigen::Matrix2d q1;
    q1 << interval * interval * interval / 3.0, interval * interval / 2.0,
        interval * interval / 2.0, interval;
    MotionModel m;
    m.F = kron_identity2(f1);
    m.Q = q * kron_identity2(q1);
    m.survival = survival;
    return m;
}

MotionModel MotionModel::for_window(const WindowClock& clock, double q,
                                    double survival_per_fine_step) {
    return nearly_constant_velocity(clock.window_interval(), q,
                                    std::pow(survival_per_fine_step, clock.fine_steps_per_window()));
}

// ---- Measurement ----

double MeasurementModel::detection_probability(TrajectoryKind kind) const {
    if (mode == DetectionMode::WindowEndPoint && kind == TrajectoryKind::DiedInWindow) return 0.0;
    return detect_prob;
}

double MeasurementModel::kind_factor(MeasurementKind z_kind, TrajectoryKind x_kind) const {
    if (mode == DetectionMode::WindowEndPoint) {
        const bool ends_alive = x_kind == TrajectoryKind::Alive || x_kind == TrajectoryKind::BornAtEnd;
        return (z_kind == MeasurementKind::LastOnly && ends_alive) ? 1.0 : 0.0;
    }
    switch (x_kind) {
        case TrajectoryKind::Alive:
            return z_kind == MeasurementKind::Full ? full_given_detect : gamma();
        case TrajectoryKind::DiedInWindow:
            return z_kind == MeasurementKind::FirstOnly ? 1.0 : 0.0;
        case TrajectoryKind::BornAtEnd:
            return z_kind == MeasurementKind::LastOnly ? 1.0 : 0.0;
    }
    return 0.0;
}

MeasurementModel MeasurementModel::position_2d(double sigma2, double detect_prob,
                                               double full_given_detect) {
    if (detect_prob < 0.0 || detect_prob > 1.0 || full_given_detect < 0.0 ||
        full_given_detect > 1.0) {
        throw std::invalid_argument("detection probabilities must lie in [0, 1]");
    }
    MeasurementModel m;
    m.H = Eigen::MatrixXd::Zero(2, 4);
    m.H(0, 0) = 1.0;
    m.H(1, 2) = 1.0;
    m.R = sigma2 * Eigen::MatrixXd::Identity(2, 2);
    m.detect_prob = detect_prob;
    m.full_given_detect = full_given_detect;
    return m;
}

MeasurementModel MeasurementModel::window_end_equivalent() const {
    MeasurementModel m = *this;
    m.detect_prob = detect_prob * (1.0 - gamma());
    m.full_given_detect = 0.0;
    m.mode = DetectionMode::WindowEndPoint;
    return m;
}

LinearObservation observation_matrix(const MeasurementModel& model, int mu, int tau) {
    const Eigen::Index nz = model.meas_dim();
    const Eigen::Index nx = model.state_dim();
    LinearObservation obs;
    if (mu == 1 && tau == 3) {
        obs.matrix = Eigen::MatrixXd::Zero(nz, 2 * nx);
        obs.matrix.leftCols(nx) = model.H;
    } else if (mu == 2 && tau == 3) {
        obs.matrix = Eigen::MatrixXd::Zero(nz, 2 * nx);
        obs.matrix.rightCols(nx) = model.H;
    } else if (mu == 3 && tau == 3) {
        obs.matrix = kron_identity2(model.H);
    } else if ((mu == 1 && tau == 1) || (mu == 2 && tau == 2)) {
        obs.matrix = model.H;
    } else {
        throw std::invalid_argument("observation_matrix: measurement space " + std::to_string(mu) +
                                    " cannot observe trajectory space " + std::to_string(tau));
    }
    obs.noise_cov = mu == 3 ? kron_identity2(model.R) : model.R;
    return obs;
}

LinearObservation observation_matrix(const MeasurementModel& model, MeasurementKind z_kind,
                                     TrajectoryKind x_kind) {
    return observation_matrix(model, measurement_dim(z_kind).mu, trajectory_space_index(x_kind));
}

double measurement_density(const MeasurementModel& model, const TrajectoryMeasurement& z,
                           TrajectoryKind x_kind, const Eigen::VectorXd& x) {
    const double factor = model.kind_factor(z.kind(), x_kind);
    if (factor == 0.0) return 0.0;
    const Eigen::Index expected = x_kind == TrajectoryKind::Alive ? 2 * model.state_dim()
                                                                  : model.state_dim();
    if (x.size() != expected) throw DimensionError("measurement_density: state dimension mismatch");
    const LinearObservation obs = observation_matrix(model, z.kind(), x_kind);
    return factor * gaussian_eval(z.stacked(), Gaussian(obs.matrix * x, obs.noise_cov));
}

std::optional<TrajectoryMeasurement> sample_target_measurement(const MeasurementModel& model,
                                                               TrajectoryKind x_kind,
                                                               const Eigen::VectorXd& x_true,
                                                               Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    if (!(uniform(rng) < model.detection_probability(x_kind))) return std::nullopt;

    constexpr MeasurementKind kKinds[] = {MeasurementKind::Full, MeasurementKind::FirstOnly,
                                          MeasurementKind::LastOnly};
    double total = 0.0;
    for (auto k : kKinds) total += model.kind_factor(k, x_kind);
    if (!(total > 0.0)) return std::nullopt;

    const double u = uniform(rng) * total;
    MeasurementKind chosen = MeasurementKind::LastOnly;
    double acc = 0.0;
    for (auto k : kKinds) {
        const double f = model.kind_factor(k, x_kind);
        if (f == 0.0) continue;
        acc += f;
        chosen = k;
        if (u < acc) break;
    }
    const LinearObservation obs = observation_matrix(model, chosen, x_kind);
    const Eigen::VectorXd z = obs.matrix * x_true + sample_noise(obs.noise_cov, rng);
    const Eigen::Index nz = model.meas_dim();
    switch (chosen) {
        case MeasurementKind::Full:
            return TrajectoryMeasurement::full(z.head(nz), z.tail(nz));
        case MeasurementKind::FirstOnly:
            return TrajectoryMeasurement::first_only(z);
        case MeasurementKind::LastOnly:
            return TrajectoryMeasurement::last_only(z);
    }
    return std::nullopt;
}

// ---- Birth ----

double BirthModel::total_weight() const {
    double total = 0.0;
    for (const auto& c : components) total += c.weight;
    return total;
}

BirthModel window_birth(const BirthModel& per_fine_step, const MotionModel& fine_motion,
                        int fine_steps_per_window) {
    std::vector<double> weights;
    std::vector<Gaussian> gaussians;
    for (const auto& c : per_fine_step.components) {
        // Born at fine step s of the window (s = 1 .. N_w), observed at step N_w.
        for (int s = fine_steps_per_window; s >= 1; --s) {
            Gaussian g = c.gaussian;
            double w = c.weight;
            for (int j = s; j < fine_steps_per_window; ++j) {
                g = Gaussian(fine_motion.F * g.mean,
                             symmetrize(fine_motion.F * g.cov * fine_motion.F.transpose() +
                                        fine_motion.Q));
                w *= fine_motion.survival;
            }
            weights.push_back(w);
            gaussians.push_back(std::move(g));
        }
    }
    BirthModel out;
    double total = 0.0;
    for (double w : weights) total += w;
    if (total > 0.0) out.components.push_back({total, moment_match(weights, gaussians)});
    return out;
}

// ---- Clutter ----

double Box::volume() const { return (upper - lower).prod(); }

bool Box::contains(const Eigen::VectorXd& z) const {
    return z.size() == lower.size() && (z.array() >= lower.array()).all() &&
           (z.array() <= upper.array()).all();
}

Eigen::VectorXd Box::sample(Rng& rng) const {
    Eigen::VectorXd z(lower.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = std::uniform_real_distribution<double>(lower(i), upper(i))(rng);
    }
    return z;
}

Box Box::rectangle(double x_min, double x_max, double y_min, double y_max) {
    return {Eigen::Vector2d(x_min, y_min), Eigen::Vector2d(x_max, y_max)};
}

ClutterModel ClutterModel::equal_split(double total_rate, Box region) {
    return {total_rate / 3.0, total_rate / 3.0, std::move(region)};
}

ClutterModel ClutterModel::window_end_equivalent() const {
    return {0.0, rate_full + rate_partial, region};
}

double clutter_intensity(const ClutterModel& model, const TrajectoryMeasurement& z) {
    const double v = model.region.volume();
    if (z.kind() == MeasurementKind::Full) {
        return model.region.contains(*z.z_first()) && model.region.contains(*z.z_last())
                   ? model.rate_full / (v * v)
                   : 0.0;
    }
    const Eigen::VectorXd& point = z.z_first() ? *z.z_first() : *z.z_last();
    return model.region.contains(point) ? model.rate_partial / v : 0.0;
}

ClutterRate clutter_rate(const ClutterModel& model) {
    return {model.rate_full + 2.0 * model.rate_partial, model.rate_full + model.rate_partial};
}

MeasurementSet sample_clutter(const ClutterModel& model, Rng& rng) {
    MeasurementSet out;
    const auto n_full = sample_poisson(model.rate_full, rng);
    for (int i = 0; i < n_full; ++i) {
        Eigen::VectorXd a = model.region.sample(rng);
        Eigen::VectorXd b = model.region.sample(rng);
        out.push_back(TrajectoryMeasurement::full(std::move(a), std::move(b)));
    }
    const auto n_first = sample_poisson(model.rate_partial, rng);
    for (int i = 0; i < n_first; ++i) {
        out.push_back(TrajectoryMeasurement::first_only(model.region.sample(rng)));
    }
    const auto n_last = sample_poisson(model.rate_partial, rng);
    for (int i = 0; i < n_last; ++i) {
        out.push_back(TrajectoryMeasurement::last_only(model.region.sample(rng)));
    }
    return out;
}

}  // namespace tmpmbm
