#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ukfm/error.hpp"
#include "ukfm/lie_groups.hpp"

using namespace ukfm;

namespace {

// Matrix exponential by its truncated power series.
Eigen::MatrixXd series_exp(const Eigen::MatrixXd& A, int terms = 30) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd term = sum;
  for (int n = 1; n < terms; ++n) {
    term = term * A / n;
    sum += term;
  }
  return sum;
}

// sum_n A^n / (n + 1)!
Eigen::MatrixXd series_left_jacobian(const Eigen::MatrixXd& A, int terms = 30) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd term = sum;
  for (int n = 1; n < terms; ++n) {
    term = term * A / (n + 1);
    sum += term;
  }
  return sum;
}

Eigen::VectorXd random_tangent(std::mt19937& gen, int d, int k, double max_angle, double trans_scale = 2.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_angle);
  const int r = so_dim(d);
  Eigen::VectorXd xi(r + d * k);
  Eigen::VectorXd axis(r);
  for (int i = 0; i < r; ++i) axis(i) = n(gen);
  xi.head(r) = axis.normalized() * u(gen);
  if (r == 1) xi(0) = (n(gen) > 0 ? 1.0 : -1.0) * u(gen);
  for (int i = r; i < xi.size(); ++i) xi(i) = trans_scale * n(gen);
  return xi;
}

}  // namespace

TEST(So3, WedgeMatchesCrossProduct) {
  const Eigen::Vector3d w(0.3, -1.2, 2.0), v(1.0, 0.5, -0.7);
  EXPECT_TRUE((wedge_so3(w) * v).isApprox(w.cross(v), 1e-15));
  EXPECT_TRUE(vee_so3(wedge_so3(w)).isApprox(w, 0.0));
}

TEST(So3, VeeRejectsNonSkew) {
  Eigen::Matrix3d M = wedge_so3(Eigen::Vector3d(1, 2, 3));
  M(0, 0) = 1e-6;
  try {
    vee_so3(M);
    FAIL() << "expected NonSkewInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSkewInput);
  }
}

TEST(So3, ExpOfZeroIsIdentity) { EXPECT_EQ(exp_so3(Eigen::Vector3d::Zero()), Eigen::Matrix3d::Identity()); }

TEST(So3, ExpMatchesSeriesAcrossAngles) {
  for (double angle : {0.0, 1e-9, 1e-6, 5e-5, 1e-4, 2e-4, 0.1, 1.0, 2.5, 3.1}) {
    const Eigen::Vector3d w = angle * Eigen::Vector3d(1, -2, 0.5).normalized();
    const Eigen::Matrix3d oracle = series_exp(wedge_so3(w));
    EXPECT_LE((exp_so3(w) - oracle).cwiseAbs().maxCoeff(), 1e-12) << "angle " << angle;
  }
}

TEST(So3, QuarterTurnAboutZ) {
  const Eigen::Matrix3d C = exp_so3(Eigen::Vector3d(0, 0, std::numbers::pi / 2));
  EXPECT_LE((C * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()).norm(), 1e-15);
}

TEST(So3, LogRoundTripNearButBelowPi) {
  const Eigen::Vector3d w = (std::numbers::pi - 1e-3) * Eigen::Vector3d(0.2, 0.9, -0.4).normalized();
  EXPECT_LE((log_so3(exp_so3(w)) - w).norm(), 1e-9);
}

TEST(So3, LogRejectsNearPi) {
  const Eigen::Matrix3d C = exp_so3(Eigen::Vector3d(std::numbers::pi, 0, 0));
  try {
    log_so3(C);
    FAIL() << "expected NearPiRotation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NearPiRotation);
  }
}

TEST(So3, LogRejectsNonRotation) {
  Eigen::Matrix3d C = Eigen::Matrix3d::Identity();
  C(0, 1) = 1e-3;
  try {
    log_so3(C);
    FAIL() << "expected NotARotation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotARotation);
  }
  EXPECT_FALSE(is_rotation(-Eigen::Matrix3d::Identity()));
}

TEST(So3, LeftJacobianMatchesSeries) {
  for (double angle : {0.0, 1e-7, 1e-4, 0.3, 2.0, 3.0}) {
    const Eigen::Vector3d w = angle * Eigen::Vector3d(-0.3, 0.1, 0.8).normalized();
    EXPECT_LE((left_jacobian_so3(w) - series_left_jacobian(wedge_so3(w))).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((left_jacobian_so3(w) * inv_left_jacobian_so3(w) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(So2, ExpLogAndJacobian) {
  for (double th : {-3.0, -1e-6, 0.0, 1e-5, 0.7, 3.1}) {
    EXPECT_NEAR(log_so2(exp_so2(th)), th, 1e-14);
    Eigen::Matrix2d A;
    A << 0, -th, th, 0;
    EXPECT_LE((exp_so2(th) - series_exp(A)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((left_jacobian_so2(th) - series_left_jacobian(A)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((left_jacobian_so2(th) * inv_left_jacobian_so2(th) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(),
              1e-13);
  }
  EXPECT_THROW(log_so2(exp_so2(std::numbers::pi)), Error);
}

TEST(ProjectToRotation, RecoversPerturbedRotation) {
  const Eigen::Matrix3d C = exp_so3(Eigen::Vector3d(0.4, -0.2, 1.0));
  Eigen::Matrix3d noisy = C;
  noisy(0, 0) += 1e-6;
  noisy(2, 1) -= 2e-6;
  const Eigen::MatrixXd P = project_to_rotation(noisy);
  EXPECT_TRUE(is_rotation(P, 1e-12));
  EXPECT_LE((P - C).norm(), 3e-6);
}

TEST(SEk, IdentityAndEmbedding) {
  const SEk X = SEk::identity(3, 2);
  EXPECT_EQ(X.matrix(), Eigen::MatrixXd::Identity(5, 5));
  EXPECT_EQ(X.dof(), 9);
  EXPECT_EQ(SEk::identity(2, 1).dof(), 3);
  EXPECT_EQ(SEk::identity(3, 0).dof(), 3);
}

TEST(SEk, FromMatrixRoundTrip) {
  const SEk X = exp_sek((Eigen::VectorXd(6) << 0.1, 0.2, 0.3, 1, 2, 3).finished(), 3, 1);
  const SEk Y = SEk::from_matrix(X.matrix(), 3);
  EXPECT_EQ(Y.matrix(), X.matrix());
}

TEST(SEk, FromMatrixRejectsMalformedBottomRows) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(4, 4);
  M(3, 0) = 1e-12;
  try {
    SEk::from_matrix(M, 3);
    FAIL() << "expected MalformedEmbedding";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedEmbedding);
  }
}

TEST(SEk, ComposeRejectsMismatchedShapes) {
  try {
    compose(SEk::identity(3, 1), SEk::identity(3, 2));
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(SEk, InverseMatchesMatrixInverse) {
  std::mt19937 gen(3);
  const SEk X = exp_sek(random_tangent(gen, 3, 2, 3.0), 3, 2);
  EXPECT_LE((inverse(X).matrix() - X.matrix().inverse()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((compose(X, inverse(X)).matrix() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ((X * SEk::identity(3, 2)).matrix(), X.matrix());
}

TEST(SEk, ExpMatchesSeriesOracle) {
  std::mt19937 gen(11);
  for (auto [d, k] : {std::pair{2, 1}, std::pair{3, 0}, std::pair{3, 1}, std::pair{3, 2}}) {
    for (int i = 0; i < 200; ++i) {
      const Eigen::VectorXd xi = random_tangent(gen, d, k, 3.0);
      const Eigen::MatrixXd oracle = series_exp(wedge_sek(xi, d, k));
      EXPECT_LE((exp_sek(xi, d, k).matrix() - oracle).cwiseAbs().maxCoeff(), 1e-10) << "d=" << d << " k=" << k;
    }
  }
}

TEST(SEk, ExpMatchesSeriesAtSmallAngles) {
  for (double angle : {0.0, 1e-10, 1e-6, 9e-5, 1.1e-4}) {
    Eigen::VectorXd xi(9);
    xi << angle * Eigen::Vector3d(0.6, 0.0, -0.8), 1.0, -2.0, 0.5, 3.0, 0.1, -1.0;
    EXPECT_LE((exp_sek(xi, 3, 2).matrix() - series_exp(wedge_sek(xi, 3, 2))).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(SEk, LogExpRoundTrip) {
  std::mt19937 gen(5);
  for (auto [d, k] : {std::pair{3, 0}, std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}}) {
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd xi = random_tangent(gen, d, k, std::numbers::pi - 0.01);
      ASSERT_LE((log_sek(exp_sek(xi, d, k)) - xi).norm(), 1e-9) << "d=" << d << " k=" << k;
    }
  }
}

TEST(SEk, ExpOfSumEqualsProductForCommutingElements) {
  // Pure translations commute.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(6), b = Eigen::VectorXd::Zero(6);
  a.tail<3>() << 1, 2, 3;
  b.tail<3>() << -0.5, 0.1, 4;
  EXPECT_LE((exp_sek(a + b, 3, 1).matrix() - (exp_sek(a, 3, 1) * exp_sek(b, 3, 1)).matrix()).norm(), 1e-14);
}

TEST(SEk, CheckedConstructorRejectsNonRotation) {
  Eigen::Matrix3d C = Eigen::Matrix3d::Identity();
  C(1, 1) = 1.1;
  EXPECT_THROW(SEk(C, Eigen::MatrixXd::Zero(3, 1)), Error);
  EXPECT_THROW(SEk(Eigen::Matrix3d::Identity(), Eigen::MatrixXd::Zero(2, 1)), Error);
}

TEST(So3, WedgeOfKnownVector) {
  Eigen::Matrix3d expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_EQ(wedge_so3(Eigen::Vector3d(1, 2, 3)), expected);
  EXPECT_EQ(vee_so3(expected), Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(wedge_so3(Eigen::Vector3d::Zero()), Eigen::Matrix3d::Zero());
}

TEST(So3, QuarterTurnAboutXAgainstSeries) {
  Eigen::Matrix3d expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  const Eigen::Vector3d w(std::numbers::pi / 2, 0, 0);
  EXPECT_LE((series_exp(wedge_so3(w)) - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((exp_so3(w) - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((log_so3(expected) - w).norm(), 1e-15);
  EXPECT_EQ(log_so3(Eigen::Matrix3d::Identity()), Eigen::Vector3d::Zero());
}

TEST(So3, ExpPreservesNorms) {
  std::mt19937 gen(8);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d w(n(gen), n(gen), n(gen)), v(n(gen), n(gen), n(gen));
    EXPECT_NEAR((exp_so3(w) * v).norm(), v.norm(), 1e-13);
  }
}

TEST(SEk, PureTranslationExpAndLog) {
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(9);
  xi.tail<6>() << 1, 2, 3, 4, 5, 6;
  Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(5, 5);
  expected.block<3, 1>(0, 3) << 1, 2, 3;
  expected.block<3, 1>(0, 4) << 4, 5, 6;
  EXPECT_EQ(exp_sek(xi, 3, 2).matrix(), expected);
  EXPECT_EQ(log_sek(SEk::from_matrix(expected, 3)), xi);
  EXPECT_EQ(log_sek(SEk::identity(3, 2)), Eigen::VectorXd::Zero(9));
}

TEST(SEk, GroupAxioms) {
  std::mt19937 gen(9);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd xi = random_tangent(gen, 3, 2, 3.0);
    const SEk X = exp_sek(xi, 3, 2);
    EXPECT_EQ(compose(SEk::identity(3, 2), X).matrix(), X.matrix());
    EXPECT_LE((inverse(inverse(X)).matrix() - X.matrix()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((compose(X, exp_sek(-xi, 3, 2)).matrix() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
  }
}
