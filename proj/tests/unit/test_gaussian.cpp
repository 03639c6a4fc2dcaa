#include "tmpmbm/gaussian.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace tmpmbm;

namespace {

Gaussian scalar(double m, double p) { return {Eigen::VectorXd::Constant(1, m), Eigen::MatrixXd::Constant(1, 1, p)}; }

}  // namespace

TEST(GaussianEval, StandardNormalAtMode) {
    EXPECT_NEAR(gaussian_eval(Eigen::VectorXd::Zero(1), scalar(0.0, 1.0)), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(gaussian_eval(Eigen::VectorXd::Zero(1), scalar(0.0, 1.0)), 0.39894, 1e-5);
}

TEST(GaussianEval, OneDimensionalTail) {
    // (1 / sqrt(4 pi)) e^-1
    EXPECT_NEAR(gaussian_eval(Eigen::VectorXd::Constant(1, 2.0), scalar(0.0, 2.0)), 0.10378, 1e-5);
}

TEST(GaussianEval, TwoDimensionalMode) {
    const Gaussian g(Eigen::Vector2d(3.0, -1.0), Eigen::Matrix2d::Identity());
    EXPECT_NEAR(gaussian_eval(g.mean, g), 1.0 / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(gaussian_eval(g.mean, g), 0.15915, 1e-5);
}

TEST(GaussianEval, SingularCovarianceThrows) {
    EXPECT_THROW((void)gaussian_eval(Eigen::Vector2d::Zero(), Gaussian(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Zero())),
                 SingularCovarianceError);
}

TEST(GaussianEval, DimensionMismatchThrows) {
    EXPECT_THROW((void)gaussian_eval(Eigen::Vector3d::Zero(), Gaussian(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity())),
                 DimensionError);
}

TEST(KalmanUpdate, ScalarHandExample) {
    const LinearObservation obs{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
    const auto res = kalman_update(scalar(0.0, 1.0), obs, Eigen::VectorXd::Constant(1, 2.0));
    EXPECT_NEAR(res.posterior.mean(0), 1.0, 1e-15);
    EXPECT_NEAR(res.posterior.cov(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(res.likelihood(), 0.10378, 1e-5);
    EXPECT_NEAR(res.log_likelihood, -0.5 * std::log(4.0 * std::numbers::pi) - 1.0, 1e-14);
}

TEST(KalmanUpdate, ExactMeasurementLimit) {
    const Gaussian prior(Eigen::Vector2d(1.0, 2.0), 4.0 * Eigen::Matrix2d::Identity());
    const LinearObservation obs{Eigen::Matrix2d::Identity(), 1e-12 * Eigen::Matrix2d::Identity()};
    const Eigen::Vector2d z(-3.0, 5.0);
    const auto res = kalman_update(prior, obs, z);
    EXPECT_LT((res.posterior.mean - z).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(KalmanUpdate, ZeroInnovationKeepsMean) {
    Eigen::MatrixXd P(2, 2);
    P << 2.0, 0.3, 0.3, 1.0;
    const Gaussian prior(Eigen::Vector2d(1.0, -2.0), P);
    Eigen::MatrixXd H(1, 2);
    H << 1.0, 1.0;
    const LinearObservation obs{H, Eigen::MatrixXd::Constant(1, 1, 0.5)};
    const auto res = kalman_update(prior, obs, H * prior.mean);
    EXPECT_LT((res.posterior.mean - prior.mean).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(res.posterior.cov, res.posterior.cov.transpose());
}

TEST(KalmanUpdate, SingularInnovationThrows) {
    const LinearObservation obs{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1)};
    EXPECT_THROW((void)kalman_update(scalar(0.0, 0.0), obs, Eigen::VectorXd::Zero(1)), SingularCovarianceError);
}

TEST(PredictTwoStep, HandExample) {
    Eigen::Matrix2d F;
    F << 1.0, 1.0, 0.0, 1.0;
    const Gaussian prior(Eigen::Vector2d(0.0, 1.0), Eigen::Matrix2d::Identity());
    const Gaussian joint = predict_two_step(prior, F, Eigen::Matrix2d::Zero());
    EXPECT_EQ(joint.mean, Eigen::Vector4d(0.0, 1.0, 1.0, 1.0));
    Eigen::Matrix2d lower;
    lower << 2.0, 1.0, 1.0, 1.0;
    EXPECT_EQ(Eigen::MatrixXd(joint.cov.bottomRightCorner(2, 2)), Eigen::MatrixXd(lower));
    EXPECT_EQ(Eigen::MatrixXd(joint.cov.topLeftCorner(2, 2)), Eigen::MatrixXd(prior.cov));
    EXPECT_EQ(Eigen::MatrixXd(joint.cov.topRightCorner(2, 2)), Eigen::MatrixXd(F.transpose()));
}

TEST(PredictTwoStep, IdentityDynamics) {
    Eigen::Matrix2d P;
    P << 2.0, 0.5, 0.5, 1.0;
    const Gaussian joint = predict_two_step({Eigen::Vector2d(1.0, 1.0), P}, Eigen::Matrix2d::Identity(),
                                            Eigen::Matrix2d::Zero());
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            EXPECT_EQ(Eigen::MatrixXd(joint.cov.block(2 * r, 2 * c, 2, 2)), Eigen::MatrixXd(P));
        }
    }
}

TEST(PredictTwoStep, ProcessNoiseAdds) {
    const Gaussian joint = predict_two_step({Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()},
                                            Eigen::Matrix2d::Identity(), 0.01 * Eigen::Matrix2d::Identity());
    EXPECT_TRUE(joint.cov.bottomRightCorner(2, 2).isApprox(1.01 * Eigen::Matrix2d::Identity(), 1e-15));
}

TEST(PredictTwoStep, DimensionMismatchThrows) {
    EXPECT_THROW((void)predict_two_step({Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()},
                                        Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Zero()),
                 DimensionError);
}

TEST(MarginalBlock, SecondHalfOfPrediction) {
    Eigen::Matrix2d F;
    F << 1.0, 1.0, 0.0, 1.0;
    const Gaussian joint = predict_two_step({Eigen::Vector2d(0.0, 1.0), Eigen::Matrix2d::Identity()}, F,
                                            Eigen::Matrix2d::Zero());
    const Gaussian end = marginal_block(joint, 2, 2);
    EXPECT_EQ(end.mean, Eigen::Vector2d(1.0, 1.0));
    Eigen::Matrix2d expected;
    expected << 2.0, 1.0, 1.0, 1.0;
    EXPECT_EQ(Eigen::MatrixXd(end.cov), Eigen::MatrixXd(expected));
}

TEST(MarginalBlock, FullRangeIsIdentity) {
    const Gaussian g(Eigen::Vector3d(1.0, 2.0, 3.0), Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal());
    const Gaussian m = marginal_block(g, 0, 3);
    EXPECT_EQ(m.mean, g.mean);
    EXPECT_EQ(m.cov, g.cov);
}

TEST(MarginalBlock, DiagonalScalars) {
    const Gaussian g(Eigen::Vector3d(1.0, 2.0, 3.0), Eigen::Vector3d(4.0, 5.0, 6.0).asDiagonal());
    for (int i = 0; i < 3; ++i) {
        const Gaussian m = marginal_block(g, i, 1);
        EXPECT_EQ(m.mean(0), i + 1.0);
        EXPECT_EQ(m.cov(0, 0), i + 4.0);
    }
}

TEST(MarginalBlock, OutOfRangeThrows) {
    const Gaussian g(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
    EXPECT_THROW((void)marginal_block(g, 1, 2), DimensionError);
}

TEST(MomentMatch, TwoPointMixture) {
    const std::vector<Gaussian> gs{scalar(-1.0, 1.0), scalar(1.0, 1.0)};
    const std::vector<double> w{1.0, 1.0};
    const Gaussian m = moment_match(w, gs);
    EXPECT_DOUBLE_EQ(m.mean(0), 0.0);
    EXPECT_DOUBLE_EQ(m.cov(0, 0), 2.0);
}

TEST(MomentMatch, SingleComponentIsIdentity) {
    Eigen::Matrix2d P;
    P << 2.0, 0.5, 0.5, 1.0;
    const std::vector<Gaussian> gs{{Eigen::Vector2d(1.5, -2.0), P}};
    const std::vector<double> w{0.3};
    const Gaussian m = moment_match(w, gs);
    EXPECT_EQ(m.mean, gs[0].mean);
    EXPECT_EQ(m.cov, gs[0].cov);
}
