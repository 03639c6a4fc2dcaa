#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmpmbm {

/// Rows are assigned to distinct columns; +infinity marks a forbidden pairing.
using CostMatrix = Eigen::MatrixXd;

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

class InfeasibleAssignmentError : public std::runtime_error {
public:
    explicit InfeasibleAssignmentError(const std::string& what) : std::runtime_error(what) {}
};

struct Assignment {
    /// Column assigned to each row.
    std::vector<int> columns;
    /// Sum of the selected entries, accumulated in row order.
    double cost = 0.0;
};

/// Squared Mahalanobis distance (z - predicted)^T S^-1 (z - predicted).
[[nodiscard]] double mahalanobis_squared(const Eigen::VectorXd& predicted, const Eigen::MatrixXd& S,
                                         const Eigen::VectorXd& z);

/// Ellipsoidal gate: true iff the squared Mahalanobis distance is at most `threshold`.
[[nodiscard]] bool gate(const Eigen::VectorXd& predicted, const Eigen::MatrixXd& S,
                        const Eigen::VectorXd& z, double threshold);

/// Minimum-cost assignment of every row to a distinct column (rows <= cols), by shortest
/// augmenting paths. Returns nullopt when no finite-cost assignment exists.
[[nodiscard]] std::optional<Assignment> solve_assignment(const CostMatrix& cost);

/// The k lowest-cost assignments in nondecreasing cost order (Murty's partitioning).
/// Throws InfeasibleAssignmentError if no finite-cost assignment exists.
[[nodiscard]] std::vector<Assignment> murty_kbest(const CostMatrix& cost, std::size_t k);

}  // namespace tmpmbm
