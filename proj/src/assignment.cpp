#include "tmpmbm/assignment.hpp"

#include <cmath>
#include <queue>

namespace tmpmbm {

double mahalanobis_squared(const Eigen::VectorXd& predicted, const Eigen::MatrixXd& S,
                           const Eigen::VectorXd& z) {
    if (predicted.size() != z.size() || S.rows() != z.size() || S.cols() != z.size()) {
        throw std::invalid_argument("mahalanobis_squared: dimension mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("mahalanobis_squared: innovation covariance is singular");
    }
    return llt.matrixL().solve(z - predicted).squaredNorm();
}

bool gate(const Eigen::VectorXd& predicted, const Eigen::MatrixXd& S, const Eigen::VectorXd& z,
          double threshold) {
    return mahalanobis_squared(predicted, S, z) <= threshold;
}

std::optional<Assignment> solve_assignment(const CostMatrix& cost) {
    const auto n = static_cast<int>(cost.rows());
    const auto m = static_cast<int>(cost.cols());
    if (n == 0) return Assignment{};
    if (n > m) return std::nullopt;

    constexpr double inf = std::numeric_limits<double>::infinity();
    // Shortest augmenting path with row/column potentials; indices are 1-based, 0 is the
    // virtual source column.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double c = cost(i0 - 1, j - 1);
                if (std::isfinite(c)) {
                    const double cur = c - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 < 0) return std::nullopt;
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.columns.assign(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        if (match[j] != 0) out.columns[static_cast<std::size_t>(match[j] - 1)] = j - 1;
    }
    for (int i = 0; i < n; ++i) out.cost += cost(i, out.columns[static_cast<std::size_t>(i)]);
    return out;
}

namespace {

struct MurtyNode {
    CostMatrix cost;          // original costs with this node's exclusions applied
    std::vector<int> fixed;   // forced column per row, or -1
    Assignment solution;
};

// Solves the node's subproblem over the rows and columns left free by its forced pairs.
std::optional<Assignment> solve_node(const CostMatrix& original, const MurtyNode& node) {
    const auto n = static_cast<int>(node.cost.rows());
    const auto m = static_cast<int>(node.cost.cols());
    std::vector<int> free_rows;
    std::vector<char> col_taken(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < n; ++i) {
        if (node.fixed[static_cast<std::size_t>(i)] < 0) {
            free_rows.push_back(i);
        } else {
            col_taken[static_cast<std::size_t>(node.fixed[static_cast<std::size_t>(i)])] = 1;
        }
    }
    std::vector<int> free_cols;
    for (int j = 0; j < m; ++j) {
        if (!col_taken[static_cast<std::size_t>(j)]) free_cols.push_back(j);
    }
    CostMatrix reduced(static_cast<Eigen::Index>(free_rows.size()),
                       static_cast<Eigen::Index>(free_cols.size()));
    for (std::size_t r = 0; r < free_rows.size(); ++r) {
        for (std::size_t c = 0; c < free_cols.size(); ++c) {
            reduced(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                node.cost(free_rows[r], free_cols[c]);
        }
    }
    const auto sub = solve_assignment(reduced);
    if (!sub) return std::nullopt;

    Assignment out;
    out.columns = node.fixed;
    for (std::size_t r = 0; r < free_rows.size(); ++r) {
        out.columns[static_cast<std::size_t>(free_rows[r])] =
            free_cols[static_cast<std::size_t>(sub->columns[r])];
    }
    for (int i = 0; i < n; ++i) out.cost += original(i, out.columns[static_cast<std::size_t>(i)]);
    if (!std::isfinite(out.cost)) return std::nullopt;
    return out;
}

bool ranks_before(const Assignment& a, const Assignment& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.columns < b.columns;
}

}  // namespace

std::vector<Assignment> murty_kbest(const CostMatrix& cost, std::size_t k) {
    std::vector<Assignment> results;
    if (k == 0) return results;
    if (cost.rows() == 0) {
        results.push_back(Assignment{});
        return results;
    }

    std::vector<MurtyNode> nodes;
    auto later = [&nodes](std::size_t a, std::size_t b) {
        return ranks_before(nodes[b].solution, nodes[a].solution);
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> queue(later);

    MurtyNode root{cost, std::vector<int>(static_cast<std::size_t>(cost.rows()), -1), {}};
    auto root_solution = solve_node(cost, root);
    if (!root_solution) {
        throw InfeasibleAssignmentError("murty_kbest: no finite-cost assignment exists");
    }
    root.solution = std::move(*root_solution);
    nodes.push_back(std::move(root));
    queue.push(0);

    while (!queue.empty() && results.size() < k) {
        const std::size_t top = queue.top();
        queue.pop();
        results.push_back(nodes[top].solution);
        if (results.size() == k) break;

        // Partition the remaining solution space of this node around its solution.
        MurtyNode parent = std::move(nodes[top]);
        nodes[top].cost.resize(0, 0);
        std::vector<int> fixed = parent.fixed;
        for (std::size_t row = 0; row < fixed.size(); ++row) {
            if (parent.fixed[row] >= 0) continue;
            const int col = parent.solution.columns[row];
            MurtyNode child{parent.cost, fixed, {}};
            child.cost(static_cast<Eigen::Index>(row), col) = kForbidden;
            if (auto sol = solve_node(cost, child)) {
                child.solution = std::move(*sol);
                nodes.push_back(std::move(child));
                queue.push(nodes.size() - 1);
            }
            fixed[row] = col;
        }
    }
    return results;
}

}  // namespace tmpmbm
