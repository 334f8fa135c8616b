#include <gtest/gtest.h>

#include <cmath>

#include "ukfm/error.hpp"
#include "ukfm/models/slam2d.hpp"

using namespace ukfm;

namespace {

SlamBelief start(const SEk& pose, const Eigen::Matrix3d& P) {
  SlamBelief b;
  b.belief.mean = MixedState{pose, Eigen::VectorXd(0)};
  b.belief.cov = P;
  return b;
}

Eigen::Matrix3d pose_cov() {
  Eigen::Matrix3d P;
  P << 0.02, 0.001, -0.002, 0.001, 0.05, 0.01, -0.002, 0.01, 0.04;
  return P;
}

}  // namespace

TEST(Slam2d, IdentityPoseInverseObservation) {
  const auto m = slam2d();
  const SlamBelief b = start(SEk::identity(2, 1), Eigen::Matrix3d::Zero());
  const SlamBelief a = augment_landmark(b, 0, Eigen::Vector2d(1.0, 0.0), Eigen::Matrix2d::Identity() * 0.01,
                                        m.retraction("left"));
  EXPECT_EQ(a.belief.mean.euclid, Eigen::Vector2d(1.0, 0.0).eval());
  EXPECT_EQ(a.ids, std::vector<int>{0});
  EXPECT_EQ(a.belief.cov.rows(), 5);
}

TEST(Slam2d, AugmentationKeepsExistingBlock) {
  const auto m = slam2d();
  for (const auto& r : m.retractions) {
    const SlamBelief b = start(exp_sek(Eigen::Vector3d(0.4, 1.0, -2.0), 2, 1), pose_cov());
    const SlamBelief a = augment_landmark(b, 3, Eigen::Vector2d(1.5, -0.5), 0.01 * Eigen::Matrix2d::Identity(), r);
    EXPECT_TRUE(a.belief.cov.topLeftCorner(3, 3) == b.belief.cov) << r.name;
    EXPECT_LE((a.belief.cov - a.belief.cov.transpose()).norm(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.belief.cov);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Slam2d, ForwardObservationReproducesInitializingMeasurement) {
  const auto m = slam2d();
  const SlamBelief b = start(exp_sek(Eigen::Vector3d(-2.0, 3.0, 1.0), 2, 1), pose_cov());
  const Eigen::Vector2d y(2.5, 0.7);
  const SlamBelief a = augment_landmark(b, 1, y, 0.01 * Eigen::Matrix2d::Identity(), m.retraction("right"));
  const int slot = slam_slot(a, 1);
  EXPECT_LE((slam_observe(a.belief.mean, std::vector<int>{slot}) - y).norm(), 1e-10);
}

TEST(Slam2d, AugmentationOrderDoesNotMatter) {
  const auto m = slam2d();
  const auto& r = m.retraction("left");
  const SlamBelief b = start(exp_sek(Eigen::Vector3d(0.8, 1.0, 2.0), 2, 1), pose_cov());
  const Eigen::Matrix2d R = 0.02 * Eigen::Matrix2d::Identity();
  const Eigen::Vector2d ya(1.0, 2.0), yb(-1.0, 0.5);
  const SlamBelief ab = augment_landmark(augment_landmark(b, 0, ya, R, r), 1, yb, R, r);
  const SlamBelief ba = augment_landmark(augment_landmark(b, 1, yb, R, r), 0, ya, R, r);
  EXPECT_LE((ab.belief.cov.topLeftCorner(3, 3) - ba.belief.cov.topLeftCorner(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  // The landmark blocks agree after permuting slots.
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(7);
  perm.indices() << 0, 1, 2, 5, 6, 3, 4;
  const Eigen::MatrixXd permuted = perm.transpose() * ba.belief.cov * perm;
  EXPECT_LE((ab.belief.cov - permuted).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Slam2d, LinearizedBlockMatchesAnalyticJacobian) {
  // Left retraction: p(xi) = p + C (J(theta) rho), C(xi) = C exp(theta), so
  // d(p + C y)/d(theta, rho) = [C J y_perp, C].
  const auto m = slam2d();
  const SEk pose = exp_sek(Eigen::Vector3d(0.3, 1.0, -1.0), 2, 1);
  const Eigen::Matrix3d P = pose_cov();
  const Eigen::Vector2d y(2.0, 1.0);
  const Eigen::Matrix2d R = 0.01 * Eigen::Matrix2d::Identity();
  const SlamBelief a = augment_landmark(start(pose, P), 0, y, R, m.retraction("left"));
  Eigen::Matrix<double, 2, 3> G;
  G.col(0) = pose.rot() * Eigen::Vector2d(-y(1), y(0));
  G.rightCols(2) = pose.rot();
  EXPECT_LE((a.belief.cov.bottomLeftCorner(2, 3) - G * P).norm(), 1e-8);
  EXPECT_LE((a.belief.cov.bottomRightCorner(2, 2) - (G * P * G.transpose() + pose.rot() * R * pose.rot().transpose()))
                .norm(),
            1e-8);
}

TEST(Slam2d, UnknownLandmarkIdThrows) {
  const SlamBelief b = start(SEk::identity(2, 1), Eigen::Matrix3d::Zero());
  try {
    slam_slot(b, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownLandmarkId);
  }
  const auto m = slam2d();
  SlamBelief c = b;
  c.ids = {99};
  c.belief.mean.euclid = Eigen::Vector2d::Zero();
  EXPECT_THROW(slam_truth_state(m, SEk::identity(2, 1), c), Error);
}

TEST(Slam2d, FilterMapsLandmarksAndStaysConsistent) {
  const auto m = slam2d();
  const SlamData data = simulate_slam(m, 600, 7, 0);
  const auto beliefs = run_slam(m, data, m.retraction("right"), 1e-3);
  ASSERT_EQ(beliefs.size(), 600u);
  const SlamBelief& last = beliefs.back();
  EXPECT_GE(last.ids.size(), 4u);
  const MixedState truth = slam_truth_state(m, data.truth.back(), last);
  for (std::size_t k = 0; k < last.ids.size(); ++k) {
    EXPECT_LE((last.belief.mean.euclid.segment<2>(2 * k) - truth.euclid.segment<2>(2 * k)).norm(), 1.0);
  }
  EXPECT_LE((last.belief.mean.group.trans() - data.truth.back().trans()).norm(), 1.0);
}

TEST(Slam2d, SimulationIsReproducible) {
  const auto m = slam2d();
  const SlamData a = simulate_slam(m, 100, 3, 2), b = simulate_slam(m, 100, 3, 2);
  EXPECT_EQ(a.truth.back().matrix(), b.truth.back().matrix());
  ASSERT_EQ(a.observations.size(), b.observations.size());
  for (std::size_t i = 0; i < a.observations.size(); ++i) {
    ASSERT_EQ(a.observations[i].size(), b.observations[i].size());
    for (std::size_t k = 0; k < a.observations[i].size(); ++k) EXPECT_EQ(a.observations[i][k].y, b.observations[i][k].y);
  }
}
