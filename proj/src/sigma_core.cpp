#include "ukfm/sigma_core.hpp"

#include <cmath>
#include <string>

namespace ukfm {

SigmaWeights set_weights(int n, double alpha) {
  if (n < 1) throw Error(ErrorCode::InvalidAlpha, "sigma point dimension must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  constexpr double kappa = 0.0;
  constexpr double beta = 2.0;
  SigmaWeights w;
  w.n = n;
  w.lambda = alpha * alpha * (n + kappa) - n;
  w.w_m = w.lambda / (n + w.lambda);
  w.w_0c = w.w_m + (1.0 - alpha * alpha + beta);
  w.w_j = 1.0 / (2.0 * (n + w.lambda));
  return w;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& P) {
  const Eigen::Index d = P.rows();
  if (P.cols() != d) throw Error(ErrorCode::DimensionMismatch, "cholesky_lower: matrix is not square");
  if (!P.allFinite()) throw Error(ErrorCode::CholeskyFailure, "covariance has non-finite entries");
  if ((P.array() == 0.0).all()) return Eigen::MatrixXd::Zero(d, d);

  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double jitter = 1e-9 * P.trace() / static_cast<double>(d);
  if (jitter > 0.0) {
    Eigen::MatrixXd Pj = P;
    Pj.diagonal().array() += jitter;
    llt.compute(Pj);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error(ErrorCode::CholeskyFailure, "covariance is not positive definite after jitter");
}

Eigen::MatrixXd sigma_points(const Eigen::MatrixXd& P, double lambda) {
  const Eigen::Index d = P.rows();
  const double scale = lambda + static_cast<double>(d);
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidAlpha, "lambda + d must be positive");
  const Eigen::MatrixXd L = cholesky_lower(scale * P);
  Eigen::MatrixXd xis(d, 2 * d);
  xis.leftCols(d) = L;
  xis.rightCols(d) = -L;
  return xis;
}

}  // namespace ukfm
