#include "tmpmbm/assignment.hpp"
#include "tmpmbm/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tmpmbm;

TEST(Gate, Boundary) {
    const Eigen::Vector2d zbar(1.0, 1.0);
    EXPECT_TRUE(gate(zbar, Eigen::Matrix2d::Identity(), zbar + Eigen::Vector2d(3.0, 0.0), 9.0));
    EXPECT_TRUE(gate(zbar, Eigen::Matrix2d::Identity(), zbar, 9.0));
    EXPECT_FALSE(gate(zbar, Eigen::Matrix2d::Identity(), zbar + Eigen::Vector2d(4.0, 0.0), 9.0));
}

TEST(Gate, MahalanobisScaling) {
    const Eigen::Matrix2d S = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    EXPECT_DOUBLE_EQ(mahalanobis_squared(Eigen::Vector2d::Zero(), S, Eigen::Vector2d(2.0, 1.0)), 2.0);
}

TEST(SolveAssignment, Optimal) {
    CostMatrix c(3, 3);
    c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    const auto a = solve_assignment(c);
    ASSERT_TRUE(a.has_value());
    EXPECT_DOUBLE_EQ(a->cost, 5.0);
    EXPECT_EQ(a->columns, (std::vector<int>{1, 0, 2}));
}

TEST(SolveAssignment, RectangularAndForbidden) {
    CostMatrix c(2, 3);
    c << kForbidden, 2.0, 1.0, kForbidden, kForbidden, 3.0;
    const auto a = solve_assignment(c);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(a->columns, (std::vector<int>{1, 2}));
    EXPECT_DOUBLE_EQ(a->cost, 5.0);
}

TEST(SolveAssignment, Infeasible) {
    CostMatrix c(2, 2);
    c << 1.0, kForbidden, 1.0, kForbidden;
    EXPECT_FALSE(solve_assignment(c).has_value());
    EXPECT_THROW((void)murty_kbest(c, 1), InfeasibleAssignmentError);
}

TEST(Murty, TwoByTwo) {
    CostMatrix c(2, 2);
    c << 1, 10, 10, 1;
    const auto sols = murty_kbest(c, 2);
    ASSERT_EQ(sols.size(), 2u);
    EXPECT_DOUBLE_EQ(sols[0].cost, 2.0);
    EXPECT_DOUBLE_EQ(sols[1].cost, 20.0);
}

TEST(Murty, FirstEqualsOptimal) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int t = 0; t < 20; ++t) {
        CostMatrix c(4, 6);
        for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
        EXPECT_NEAR(murty_kbest(c, 1).at(0).cost, solve_assignment(c)->cost, 1e-12);
    }
}

TEST(Murty, FewerSolutionsThanRequested) {
    CostMatrix c(2, 2);
    c << 1, 2, 3, 4;
    EXPECT_EQ(murty_kbest(c, 10).size(), 2u);
}

TEST(Murty, MatchesEnumeration) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int t = 0; t < 30; ++t) {
        CostMatrix c(4, 4);
        for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
        const auto sols = murty_kbest(c, 24);
        const auto ref = oracle::all_assignments(c);
        ASSERT_EQ(sols.size(), 24u);
        ASSERT_EQ(ref.size(), 24u);
        for (std::size_t k = 0; k < 24; ++k) EXPECT_NEAR(sols[k].cost, ref[k].cost, 1e-12);
    }
}

TEST(Murty, DistinctSolutions) {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> u(0, 3);
    CostMatrix c(3, 5);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
    const auto sols = murty_kbest(c, 60);
    EXPECT_EQ(sols.size(), 60u);
    for (std::size_t a = 0; a < sols.size(); ++a) {
        for (std::size_t b = a + 1; b < sols.size(); ++b) EXPECT_NE(sols[a].columns, sols[b].columns);
        if (a > 0) EXPECT_LE(sols[a - 1].cost, sols[a].cost);
    }
}
