#include "tmpmbm/gospa.hpp"

#include "tmpmbm/assignment.hpp"

#include <cmath>
#include <stdexcept>

namespace tmpmbm {

namespace {

double distance_pow(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double p) {
    const double d2 = (a - b).squaredNorm();
    return p == 2.0 ? d2 : std::pow(std::sqrt(d2), p);
}

}  // namespace

GospaResult gospa(std::span<const Eigen::VectorXd> truth, std::span<const Eigen::VectorXd> estimates,
                  const GospaParams& params) {
    if (!(params.c > 0.0) || params.p < 1.0) {
        throw std::invalid_argument("gospa: requires c > 0 and p >= 1");
    }
    const auto n = static_cast<Eigen::Index>(truth.size());
    const auto m = static_cast<Eigen::Index>(estimates.size());
    const double cp = std::pow(params.c, params.p);

    // Rows: truth. Columns: estimates, then one "leave unassigned" column per truth element.
    // Entries are the saving relative to leaving both elements unassigned.
    CostMatrix cost = CostMatrix::Zero(n, m + n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            cost(i, j) = std::min(distance_pow(truth[static_cast<std::size_t>(i)],
                                               estimates[static_cast<std::size_t>(j)], params.p),
                                  cp) - cp;
        }
    }
    const auto solution = solve_assignment(cost);

    GospaResult out;
    double loc_cost = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int j = solution->columns[static_cast<std::size_t>(i)];
        if (j >= m) continue;
        const double d = distance_pow(truth[static_cast<std::size_t>(i)],
                                      estimates[static_cast<std::size_t>(j)], params.p);
        if (d < cp) {
            loc_cost += d;
            ++out.n_assigned;
        }
    }
    out.n_missed = static_cast<int>(n) - out.n_assigned;
    out.n_false = static_cast<int>(m) - out.n_assigned;
    const double missed_cost = 0.5 * cp * out.n_missed;
    const double false_cost = 0.5 * cp * out.n_false;
    const double inv_p = 1.0 / params.p;
    out.total = std::pow(loc_cost + missed_cost + false_cost, inv_p);
    out.localisation = std::pow(loc_cost, inv_p);
    out.missed = std::pow(missed_cost, inv_p);
    out.false_ = std::pow(false_cost, inv_p);
    return out;
}

GospaResult rms(std::span<const GospaResult> series) {
    if (series.empty()) throw std::invalid_argument("rms: empty series");
    GospaResult out;
    for (const auto& r : series) {
        out.total += r.total * r.total;
        out.localisation += r.localisation * r.localisation;
        out.missed += r.missed * r.missed;
        out.false_ += r.false_ * r.false_;
        out.n_assigned += r.n_assigned;
        out.n_missed += r.n_missed;
        out.n_false += r.n_false;
    }
    const auto count = static_cast<double>(series.size());
    out.total = std::sqrt(out.total / count);
    out.localisation = std::sqrt(out.localisation / count);
    out.missed = std::sqrt(out.missed / count);
    out.false_ = std::sqrt(out.false_ / count);
    return out;
}

}  // namespace tmpmbm
