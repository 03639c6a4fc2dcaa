#include "tmpmbm/oracles.hpp"
#include "tmpmbm/pmbm.hpp"
#include "tmpmbm/tm_filter.hpp"
#include "tmpmbm/validation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tmpmbm;

// ---- Randomised recursion properties ----

TEST(Properties, RecursionInvariants) {
    const auto r = check_recursion_invariants(10, 15, {.seed = 77});
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Properties, MergeAndMarginaliseCommute) {
    const auto r = check_order_swap(20, {.seed = 78});
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Properties, KalmanOracles) {
    const auto a = check_kalman(20, {.seed = 79});
    EXPECT_TRUE(a.passed) << a.detail;
    const auto b = check_baseline_kalman(20, {.seed = 79});
    EXPECT_TRUE(b.passed) << b.detail;
}

TEST(Properties, DensityIntegral) {
    const auto r = check_density_integral(50000, {.seed = 80});
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Properties, NormalizeAndPruneIsIdempotent) {
    Rng rng(81);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        PmbmState s;
        s.targets.resize(3);
        for (auto& hyps : s.targets) {
            for (int h = 0; h < 3; ++h) {
                LocalHypothesis lh;
                lh.existence = u(rng);
                lh.state = {Eigen::Vector4d::Random(), Eigen::Matrix4d::Identity()};
                hyps.push_back(lh);
            }
        }
        s.globals.clear();
        for (int g = 0; g < 8; ++g) {
            std::vector<int> a(3);
            for (auto& x : a) x = static_cast<int>(u(rng) * 4.0) - 1;
            s.globals.push_back({u(rng), a});
        }
        const auto once = normalize_and_prune(s, {});
        const auto twice = normalize_and_prune(once, {});
        ASSERT_EQ(once.globals.size(), twice.globals.size());
        double sum = 0.0;
        for (std::size_t g = 0; g < once.globals.size(); ++g) {
            EXPECT_NEAR(once.globals[g].weight, twice.globals[g].weight, 1e-15);
            EXPECT_EQ(once.globals[g].assignment, twice.globals[g].assignment);
            sum += once.globals[g].weight;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_EQ(hypothesis_counts(once).local, hypothesis_counts(twice).local);
    }
}

TEST(Properties, MergedExistenceIsWeightedMean) {
    Rng rng(82);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        PmbmState s;
        s.targets.resize(1);
        s.globals.clear();
        double expected = 0.0;
        double total = 0.0;
        for (int h = 0; h < 4; ++h) {
            LocalHypothesis lh;
            lh.existence = u(rng);
            lh.state = {Eigen::Vector4d::Random(), Eigen::Matrix4d::Identity()};
            s.targets[0].push_back(lh);
            const double w = u(rng) + 1e-3;
            s.globals.push_back({w, {h}});
            expected += w * lh.existence;
            total += w;
        }
        for (auto& g : s.globals) g.weight /= total;
        const auto m = kld_merge_to_pmb(s);
        EXPECT_NEAR(m.targets[0][0].existence, expected / total, 1e-12);
    }
}

// ---- The suites notice injected faults ----

TEST(FaultInjection, SuitesFail) {
    const ValidationOptions bad{.seed = 83, .inject_fault = true};
    EXPECT_FALSE(check_murty(20, 4, bad).passed);
    EXPECT_FALSE(check_gospa(20, 4, bad).passed);
    EXPECT_FALSE(check_kalman(10, bad).passed);
    EXPECT_FALSE(check_order_swap(5, bad).passed);
}
