#include "tmpmbm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

namespace tmpmbm::oracle {

std::vector<Assignment> all_assignments(const CostMatrix& cost) {
    const auto n = static_cast<int>(cost.rows());
    const auto m = static_cast<int>(cost.cols());
    std::vector<Assignment> out;
    std::vector<int> cols;
    std::vector<char> used(static_cast<std::size_t>(m), 0);
    std::function<void(int)> extend = [&](int row) {
        if (row == n) {
            Assignment a;
            a.columns = cols;
            for (int i = 0; i < n; ++i) a.cost += cost(i, cols[static_cast<std::size_t>(i)]);
            if (std::isfinite(a.cost)) out.push_back(std::move(a));
            return;
        }
        for (int j = 0; j < m; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            used[static_cast<std::size_t>(j)] = 1;
            cols.push_back(j);
            extend(row + 1);
            cols.pop_back();
            used[static_cast<std::size_t>(j)] = 0;
        }
    };
    extend(0);
    std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.columns < b.columns;
    });
    return out;
}

double gospa_brute_force(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y,
                         double c, double p) {
    const bool swap = x.size() > y.size();
    const auto& small = swap ? y : x;
    const auto& large = swap ? x : y;
    const double cp = std::pow(c, p);
    double best = std::numeric_limits<double>::infinity();

    // Each element of the smaller set is matched to a distinct element of the larger set or
    // left unmatched (-1).
    std::vector<int> match(small.size(), -1);
    std::vector<char> used(large.size(), 0);
    std::function<void(std::size_t)> extend = [&](std::size_t i) {
        if (i == small.size()) {
            double loc = 0.0;
            int pairs = 0;
            for (std::size_t a = 0; a < small.size(); ++a) {
                if (match[a] < 0) continue;
                const double d = std::sqrt((small[a] - large[static_cast<std::size_t>(match[a])]).squaredNorm());
                loc += std::pow(d, p);
                ++pairs;
            }
            const auto unmatched = static_cast<double>(small.size() + large.size()) - 2.0 * pairs;
            best = std::min(best, loc + cp / 2.0 * unmatched);
            return;
        }
        match[i] = -1;
        extend(i + 1);
        for (std::size_t j = 0; j < large.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            match[i] = static_cast<int>(j);
            extend(i + 1);
            used[j] = 0;
        }
        match[i] = -1;
    };
    extend(0);
    return std::pow(best, 1.0 / p);
}

std::vector<Gaussian> stacked_kalman(const Gaussian& prior, const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& H,
                                     const Eigen::MatrixXd& R,
                                     const std::vector<Eigen::VectorXd>& z_first,
                                     const std::vector<Eigen::VectorXd>& z_last) {
    const Eigen::Index nx = F.rows();
    const Eigen::Index nz = H.rows();
    Eigen::MatrixXd H2 = Eigen::MatrixXd::Zero(2 * nz, 2 * nx);
    H2.block(0, 0, nz, nx) = H;
    H2.block(nz, nx, nz, nx) = H;
    Eigen::MatrixXd R2 = Eigen::MatrixXd::Zero(2 * nz, 2 * nz);
    R2.block(0, 0, nz, nz) = R;
    R2.block(nz, nz, nz, nz) = R;

    std::vector<Gaussian> out;
    Eigen::VectorXd m = prior.mean;
    Eigen::MatrixXd P = prior.cov;
    for (std::size_t k = 0; k < z_first.size(); ++k) {
        Eigen::VectorXd mj(2 * nx);
        mj.head(nx) = m;
        mj.tail(nx) = F * m;
        Eigen::MatrixXd Pj(2 * nx, 2 * nx);
        Pj.block(0, 0, nx, nx) = P;
        Pj.block(0, nx, nx, nx) = P * F.transpose();
        Pj.block(nx, 0, nx, nx) = F * P;
        Pj.block(nx, nx, nx, nx) = F * P * F.transpose() + Q;

        Eigen::VectorXd z(2 * nz);
        z << z_first[k], z_last[k];
        const Eigen::MatrixXd S = H2 * Pj * H2.transpose() + R2;
        const Eigen::MatrixXd K = Pj * H2.transpose() * S.inverse();
        mj += K * (z - H2 * mj);
        Pj = (Eigen::MatrixXd::Identity(2 * nx, 2 * nx) - K * H2) * Pj;

        m = mj.tail(nx);
        P = Pj.block(nx, nx, nx, nx);
        P = 0.5 * (P + P.transpose()).eval();
        out.emplace_back(m, P);
    }
    return out;
}

std::vector<Gaussian> point_kalman(const Gaussian& prior, const Eigen::MatrixXd& F,
                                   const Eigen::MatrixXd& Q, const Eigen::MatrixXd& H,
                                   const Eigen::MatrixXd& R, const std::vector<Eigen::VectorXd>& z) {
    std::vector<Gaussian> out;
    Eigen::VectorXd m = prior.mean;
    Eigen::MatrixXd P = prior.cov;
    for (const auto& zk : z) {
        m = F * m;
        P = F * P * F.transpose() + Q;
        const Eigen::MatrixXd S = H * P * H.transpose() + R;
        const Eigen::MatrixXd K = P * H.transpose() * S.inverse();
        m += K * (zk - H * m);
        P = (Eigen::MatrixXd::Identity(P.rows(), P.cols()) - K * H) * P;
        P = 0.5 * (P + P.transpose()).eval();
        out.emplace_back(m, P);
    }
    return out;
}

double measurement_density_integral(const MeasurementModel& model, const Eigen::VectorXd& x,
                                    int samples_per_kind, Rng& rng) {
    const Eigen::Index nx = model.state_dim();
    const Eigen::Index nz = model.meas_dim();
    const Eigen::VectorXd first = model.H * x.head(nx);
    const Eigen::VectorXd last = model.H * x.tail(nx);
    // Proposal: independent normals per coordinate, three times wider than the noise.
    const double sd = 3.0 * std::sqrt(model.R.diagonal().maxCoeff());
    std::normal_distribution<double> normal(0.0, 1.0);

    auto estimate = [&](MeasurementKind kind) {
        const Eigen::Index dim = kind == MeasurementKind::Full ? 2 * nz : nz;
        Eigen::VectorXd centre(dim);
        if (kind == MeasurementKind::Full) {
            centre << first, last;
        } else {
            centre = kind == MeasurementKind::FirstOnly ? first : last;
        }
        double sum = 0.0;
        for (int s = 0; s < samples_per_kind; ++s) {
            Eigen::VectorXd u(dim);
            for (Eigen::Index i = 0; i < dim; ++i) u(i) = normal(rng);
            const Eigen::VectorXd z = centre + sd * u;
            const double log_q = -0.5 * u.squaredNorm() -
                                 static_cast<double>(dim) * std::log(sd * std::sqrt(2.0 * std::numbers::pi));
            TrajectoryMeasurement zm =
                kind == MeasurementKind::Full
                    ? TrajectoryMeasurement::full(z.head(nz), z.tail(nz))
                    : (kind == MeasurementKind::FirstOnly ? TrajectoryMeasurement::first_only(z)
                                                          : TrajectoryMeasurement::last_only(z));
            sum += measurement_density(model, zm, TrajectoryKind::Alive, x) / std::exp(log_q);
        }
        return sum / samples_per_kind;
    };
    return estimate(MeasurementKind::FirstOnly) + estimate(MeasurementKind::LastOnly) +
           estimate(MeasurementKind::Full);
}

}  // namespace tmpmbm::oracle
