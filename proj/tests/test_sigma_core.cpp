#include <gtest/gtest.h>

#include <optional>
#include <vector>

#include "ukfm/error.hpp"
#include "ukfm/sigma_core.hpp"

using namespace ukfm;

namespace {

Eigen::MatrixXd spd(int n, double shift = 0.5) {
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = std::sin(1.0 + i * 1.3 + j * 0.7);
  return A * A.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

const Retraction<Eigen::VectorXd> kAdd = additive_retraction();

}  // namespace

TEST(Weights, ScaledTransformValues) {
  const SigmaWeights w = set_weights(3, 0.5);
  EXPECT_DOUBLE_EQ(w.lambda, 0.25 * 3 - 3);
  EXPECT_DOUBLE_EQ(w.w_m, w.lambda / (3 + w.lambda));
  EXPECT_DOUBLE_EQ(w.w_0c, w.w_m + 1 - 0.25 + 2);
  EXPECT_DOUBLE_EQ(w.w_j, 1.0 / (2 * (3 + w.lambda)));
  EXPECT_NEAR(w.w_m + 2 * 3 * w.w_j, 1.0, 1e-15);
}

TEST(Weights, AlphaOneGivesZeroCentralMeanWeight) {
  const SigmaWeights w = set_weights(4, 1.0);
  EXPECT_EQ(w.lambda, 0.0);
  EXPECT_EQ(w.w_m, 0.0);
  EXPECT_EQ(w.w_0c, 2.0);
  EXPECT_EQ(w.w_j, 1.0 / 8.0);
}

TEST(Weights, RejectsInvalidAlpha) {
  for (double a : {0.0, -0.1, 1.5}) {
    try {
      set_weights(3, a);
      FAIL() << "alpha " << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidAlpha);
    }
  }
  EXPECT_THROW(set_weights(0, 0.5), Error);
}

TEST(Cholesky, FactorReproducesMatrix) {
  const Eigen::MatrixXd P = spd(5);
  const Eigen::MatrixXd L = cholesky_lower(P);
  EXPECT_LE((L * L.transpose() - P).norm(), 1e-12);
  EXPECT_TRUE(L.isLowerTriangular());
}

TEST(Cholesky, ZeroMatrixGivesZeroFactor) {
  EXPECT_EQ(cholesky_lower(Eigen::MatrixXd::Zero(3, 3)), Eigen::MatrixXd::Zero(3, 3));
}

TEST(Cholesky, SemidefiniteRecoversWithJitter) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, 2);
  P(0, 0) = 1.0;
  const Eigen::MatrixXd L = cholesky_lower(P);
  EXPECT_LE((L * L.transpose() - P).norm(), 1e-8);
}

TEST(Cholesky, IndefiniteThrows) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(2, 2);
  P(1, 1) = -1.0;
  try {
    cholesky_lower(P);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CholeskyFailure);
  }
}

TEST(SigmaPoints, SymmetricAndMatchCovariance) {
  const Eigen::MatrixXd P = spd(4);
  const SigmaWeights w = set_weights(4, 0.3);
  const Eigen::MatrixXd X = sigma_points(P, w.lambda);
  ASSERT_EQ(X.cols(), 8);
  EXPECT_LE((X.leftCols(4) + X.rightCols(4)).norm(), 0.0);
  EXPECT_LE((w.w_j * X * X.transpose() - P).norm(), 1e-12);
}

TEST(Update, MatchesKalmanOnLinearObservation) {
  const Eigen::MatrixXd P = spd(3);
  const Eigen::VectorXd x = Eigen::Vector3d(1.0, -2.0, 0.5);
  Eigen::MatrixXd H(2, 3);
  H << 1, 0, 2, 0, -1, 1;
  const Eigen::MatrixXd R = Eigen::Vector2d(0.3, 0.1).asDiagonal();
  const Eigen::VectorXd y = Eigen::Vector2d(0.7, 2.0);
  const ObservationFn<Eigen::VectorXd> h = [&H](const Eigen::VectorXd& s) -> Eigen::VectorXd { return H * s; };

  const Eigen::MatrixXd S = H * P * H.transpose() + R;
  const Eigen::MatrixXd K = P * H.transpose() * S.inverse();
  const Eigen::VectorXd x_kf = x + K * (y - H * x);
  const Eigen::MatrixXd P_kf = P - K * S * K.transpose();

  for (double alpha : {1e-3, 0.1, 1.0}) {
    UpdateTrace tr;
    const auto b = update<Eigen::VectorXd>({x, P}, y, h, R, kAdd, alpha, &tr);
    EXPECT_LE((b.mean - x_kf).norm(), 1e-10) << alpha;
    EXPECT_LE((b.cov - P_kf).norm(), 1e-10) << alpha;
    EXPECT_LE((tr.P_yy - S).norm(), 1e-10);
    EXPECT_LE((tr.K - K).norm(), 1e-10);
  }
}

TEST(Update, ZeroCovarianceLeavesBeliefUnchanged) {
  const ObservationFn<Eigen::VectorXd> h = [](const Eigen::VectorXd& s) -> Eigen::VectorXd { return s; };
  const Eigen::VectorXd x = Eigen::Vector2d(1, 2);
  const auto b = update<Eigen::VectorXd>({x, Eigen::MatrixXd::Zero(2, 2)}, Eigen::Vector2d(5, 5), h,
                                         Eigen::MatrixXd::Identity(2, 2), kAdd, 1e-3);
  EXPECT_EQ(b.mean, x);
  EXPECT_EQ(b.cov, Eigen::MatrixXd::Zero(2, 2));
}

TEST(Update, SingularInnovationThrows) {
  const ObservationFn<Eigen::VectorXd> h = [](const Eigen::VectorXd& s) -> Eigen::VectorXd { return s; };
  try {
    update<Eigen::VectorXd>({Eigen::Vector2d(1, 2), Eigen::MatrixXd::Zero(2, 2)}, Eigen::Vector2d(0, 0), h,
                            Eigen::MatrixXd::Zero(2, 2), kAdd, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularInnovationCovariance);
  }
}

TEST(Update, DimensionMismatchThrows) {
  const ObservationFn<Eigen::VectorXd> h = [](const Eigen::VectorXd& s) -> Eigen::VectorXd { return s; };
  EXPECT_THROW(update<Eigen::VectorXd>({Eigen::Vector2d(1, 2), spd(2)}, Eigen::Vector3d(0, 0, 0), h,
                                       Eigen::MatrixXd::Identity(2, 2), kAdd, 0.5),
               Error);
}

TEST(Propagate, MatchesLinearPrediction) {
  Eigen::Matrix2d F;
  F << 1, 0.1, 0, 1;
  const Eigen::MatrixXd Q = Eigen::Vector2d(0.01, 0.04).asDiagonal();
  const PropagationFn<Eigen::VectorXd> f = [&F](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                                const Eigen::VectorXd& w, double) -> Eigen::VectorXd {
    return F * x + u + w;
  };
  const Eigen::MatrixXd P = spd(2);
  for (double alpha : {1e-3, 0.5, 1.0}) {
    const auto b = propagate<Eigen::VectorXd>({Eigen::Vector2d(1, 1), P}, Eigen::Vector2d(0.5, 0), f, Q, 0.1, kAdd,
                                              alpha);
    EXPECT_LE((b.mean - (F * Eigen::Vector2d(1, 1) + Eigen::Vector2d(0.5, 0))).norm(), 1e-15);
    EXPECT_LE((b.cov - (F * P * F.transpose() + Q)).norm(), 1e-10) << alpha;
  }
}

TEST(Propagate, ZeroNoiseAndZeroCovarianceStayZero) {
  const PropagationFn<Eigen::VectorXd> f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&,
                                              const Eigen::VectorXd& w, double) -> Eigen::VectorXd { return x + w; };
  const auto b = propagate<Eigen::VectorXd>({Eigen::Vector2d(1, 1), Eigen::MatrixXd::Zero(2, 2)},
                                            Eigen::VectorXd(0), f, Eigen::MatrixXd::Zero(2, 2), 0.1, kAdd, 0.5);
  EXPECT_EQ(b.cov, Eigen::MatrixXd::Zero(2, 2));
}

TEST(FilterRun, WrapsFailuresWithStepIndex) {
  FilterModel<Eigen::VectorXd> m;
  m.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&, const Eigen::VectorXd& w, double) -> Eigen::VectorXd {
    return x + w;
  };
  m.h = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  m.Q = Eigen::MatrixXd::Zero(1, 1);
  m.R = Eigen::MatrixXd::Zero(1, 1);
  m.dt = 1.0;
  const std::vector<Eigen::VectorXd> u(5, Eigen::VectorXd(0));
  std::vector<std::optional<Eigen::VectorXd>> y(5);
  y[2] = Eigen::VectorXd::Zero(1);
  try {
    filter_run<Eigen::VectorXd>(m, {Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1)}, u, y, kAdd, 0.5);
    FAIL();
  } catch (const StepError& e) {
    EXPECT_EQ(e.step(), 3u);
    EXPECT_EQ(e.code(), ErrorCode::SingularInnovationCovariance);
  }
}

TEST(FilterRun, IsDeterministic) {
  FilterModel<Eigen::VectorXd> m;
  m.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w, double dt) -> Eigen::VectorXd {
    return (x.array().sin() * dt + x.array() + u(0) + w.array()).matrix();
  };
  m.h = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.array().cos().matrix(); };
  m.Q = 0.01 * Eigen::MatrixXd::Identity(2, 2);
  m.R = 0.1 * Eigen::MatrixXd::Identity(2, 2);
  m.dt = 0.1;
  std::vector<Eigen::VectorXd> u;
  std::vector<std::optional<Eigen::VectorXd>> y;
  for (int i = 0; i < 50; ++i) {
    u.push_back(Eigen::VectorXd::Constant(1, 0.01 * i));
    y.push_back(Eigen::Vector2d(std::cos(0.1 * i), std::sin(0.1 * i)).eval());
  }
  const Belief<Eigen::VectorXd> b0{Eigen::Vector2d(0.1, 0.2), spd(2)};
  const auto a = filter_run(m, b0, u, y, kAdd, 1e-3);
  const auto b = filter_run(m, b0, u, y, kAdd, 1e-3);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_EQ(a[i].cov, b[i].cov);
  }
}

TEST(Weights, TinyAlpha) {
  const SigmaWeights w = set_weights(2, 1e-3);
  EXPECT_NEAR(w.lambda, 2 * (1e-6 - 1), 1e-15);
  EXPECT_NEAR(w.w_j, 1.0 / (4e-6), 1e-4);
  const SigmaWeights w3 = set_weights(3, 1.0);
  EXPECT_EQ(w3.w_j, 1.0 / 6.0);
  EXPECT_EQ(w3.w_0c, 2.0);
}

TEST(SigmaPoints, IdentityCovarianceUnitLambda) {
  const Eigen::MatrixXd X = sigma_points(Eigen::MatrixXd::Identity(2, 2), 0.0);
  Eigen::MatrixXd expected(2, 4);
  expected << std::sqrt(2.0), 0, -std::sqrt(2.0), 0, 0, std::sqrt(2.0), 0, -std::sqrt(2.0);
  EXPECT_LE((X - expected).norm(), 1e-15);
}

TEST(Update, ScalarClosedForm) {
  const ObservationFn<Eigen::VectorXd> h = [](const Eigen::VectorXd& s) -> Eigen::VectorXd { return s; };
  const auto b = update<Eigen::VectorXd>({Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)},
                                         Eigen::VectorXd::Constant(1, 2.0), h, Eigen::MatrixXd::Ones(1, 1), kAdd, 0.5);
  EXPECT_NEAR(b.mean(0), 1.0, 1e-12);
  EXPECT_NEAR(b.cov(0, 0), 0.5, 1e-12);
}

TEST(Update, PredictedMeasurementLeavesMeanForLinearH) {
  Eigen::MatrixXd H(2, 3);
  H << 1, 2, 0, 0, 1, -1;
  const ObservationFn<Eigen::VectorXd> h = [&H](const Eigen::VectorXd& s) -> Eigen::VectorXd { return H * s; };
  const Eigen::VectorXd x = Eigen::Vector3d(0.5, 1.0, -1.0);
  const auto b = update<Eigen::VectorXd>({x, spd(3)}, H * x, h, Eigen::MatrixXd::Identity(2, 2), kAdd, 1e-3);
  EXPECT_LE((b.mean - x).norm(), 1e-10);
}

TEST(Update, CovarianceNeverGrowsForLinearH) {
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd H(2, 4);
    for (int k = 0; k < 8; ++k) H(k) = std::cos(1.7 * k + trial);
    const ObservationFn<Eigen::VectorXd> h = [&H](const Eigen::VectorXd& s) -> Eigen::VectorXd { return H * s; };
    const Eigen::MatrixXd P = spd(4, 0.1 + trial * 0.05);
    const auto b = update<Eigen::VectorXd>({Eigen::VectorXd::Zero(4), P}, Eigen::Vector2d(1, -1), h,
                                           0.3 * Eigen::MatrixXd::Identity(2, 2), kAdd, 1e-3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P - b.cov);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Propagate, ScalarRandomWalk) {
  const PropagationFn<Eigen::VectorXd> f = [](const Eigen::VectorXd& x, const Eigen::VectorXd&,
                                              const Eigen::VectorXd& w, double) -> Eigen::VectorXd { return x + w; };
  const auto b = propagate<Eigen::VectorXd>({Eigen::VectorXd::Constant(1, 3.0), Eigen::MatrixXd::Ones(1, 1)},
                                            Eigen::VectorXd(0), f, Eigen::MatrixXd::Ones(1, 1), 1.0, kAdd, 1e-3);
  EXPECT_EQ(b.mean(0), 3.0);
  EXPECT_NEAR(b.cov(0, 0), 2.0, 1e-10);
  const auto c = propagate<Eigen::VectorXd>({Eigen::VectorXd::Constant(1, 3.0), Eigen::MatrixXd::Ones(1, 1)},
                                            Eigen::VectorXd(0), f, Eigen::MatrixXd::Zero(1, 1), 1.0, kAdd, 1e-3);
  EXPECT_NEAR(c.cov(0, 0), 1.0, 1e-12);
}

TEST(FilterRun, EmptyScheduleIsDeadReckoning) {
  FilterModel<Eigen::VectorXd> m;
  m.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w, double) -> Eigen::VectorXd {
    return x + u + w;
  };
  m.h = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  m.Q = Eigen::MatrixXd::Constant(1, 1, 0.5);
  m.R = Eigen::MatrixXd::Ones(1, 1);
  const std::vector<Eigen::VectorXd> u(10, Eigen::VectorXd::Constant(1, 1.0));
  const auto out = filter_run<Eigen::VectorXd>(m, {Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)}, u, {}, kAdd,
                                               1e-3);
  EXPECT_NEAR(out.back().mean(0), 10.0, 1e-12);
  EXPECT_NEAR(out.back().cov(0, 0), 1.0 + 10 * 0.5, 1e-9);
}
