#include "ukfm/lie_groups.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ukfm/error.hpp"

namespace ukfm {

namespace {

void check_rotation(const Eigen::MatrixXd& C) {
  if (!is_rotation(C)) throw Error(ErrorCode::NotARotation, "matrix fails C^T C = I or det C = 1");
}

Eigen::Matrix2d so2_generator() {
  Eigen::Matrix2d S;
  S << 0.0, -1.0, 1.0, 0.0;
  return S;
}

}  // namespace

Eigen::Matrix3d wedge_so3(const Eigen::Vector3d& w) {
  Eigen::Matrix3d M;
  M << 0.0, -w(2), w(1),
       w(2), 0.0, -w(0),
       -w(1), w(0), 0.0;
  return M;
}

Eigen::Vector3d vee_so3(const Eigen::Matrix3d& M) {
  if ((M + M.transpose()).norm() > 1e-9) throw Error(ErrorCode::NonSkewInput, "vee_so3 input is not skew-symmetric");
  return Eigen::Vector3d(M(2, 1), M(0, 2), M(1, 0));
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = wedge_so3(w);
  double a;  // sin(t)/t
  double b;  // (1 - cos(t))/t^2
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    const double s = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * s * s / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() + a * W + b * W * W;
}

Eigen::Vector3d log_so3(const Eigen::Matrix3d& C) {
  check_rotation(C);
  const Eigen::Vector3d axis_sin(C(2, 1) - C(1, 2), C(0, 2) - C(2, 0), C(1, 0) - C(0, 1));  // 2 sin(t) u
  const double cos_t = 0.5 * (C.trace() - 1.0);
  const double sin_t = 0.5 * axis_sin.norm();
  const double theta = std::atan2(sin_t, cos_t);
  if (theta > std::numbers::pi - kNearPiMargin) {
    throw Error(ErrorCode::NearPiRotation, "rotation angle " + std::to_string(theta) + " too close to pi");
  }
  double scale;  // t / (2 sin t)
  if (theta < kSmallAngle) {
    scale = 0.5 * (1.0 + theta * theta / 6.0);
  } else {
    scale = 0.5 * theta / sin_t;
  }
  return scale * axis_sin;
}

Eigen::Matrix3d left_jacobian_so3(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = wedge_so3(w);
  double b;  // (1 - cos t)/t^2
  double c;  // (t - sin t)/t^3
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double s = std::sin(0.5 * theta);
    b = 2.0 * s * s / (theta * theta);
    c = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  return Eigen::Matrix3d::Identity() + b * W + c * W * W;
}

Eigen::Matrix3d inv_left_jacobian_so3(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = wedge_so3(w);
  double e;  // 1/t^2 - (1 + cos t)/(2 t sin t)
  if (theta < kSmallAngle) {
    e = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    const double half = 0.5 * theta;
    e = (1.0 - half / std::tan(half)) / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() - 0.5 * W + e * W * W;
}

Eigen::Matrix2d exp_so2(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d C;
  C << c, -s, s, c;
  return C;
}

double log_so2(const Eigen::Matrix2d& C) {
  check_rotation(C);
  const double theta = std::atan2(C(1, 0), C(0, 0));
  if (std::abs(theta) > std::numbers::pi - kNearPiMargin) {
    throw Error(ErrorCode::NearPiRotation, "rotation angle " + std::to_string(theta) + " too close to pi");
  }
  return theta;
}

Eigen::Matrix2d left_jacobian_so2(double theta) {
  double a;  // sin(t)/t
  double b;  // (1 - cos t)/t
  if (std::abs(theta) < kSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 * theta * (1.0 - t2 / 12.0);
  } else {
    const double s = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * s * s / theta;
  }
  return a * Eigen::Matrix2d::Identity() + b * so2_generator();
}

Eigen::Matrix2d inv_left_jacobian_so2(double theta) {
  const double half = 0.5 * theta;
  double a;  // (t/2) cot(t/2)
  if (std::abs(theta) < kSmallAngle) {
    a = 1.0 - theta * theta / 12.0;
  } else {
    a = half / std::tan(half);
  }
  return a * Eigen::Matrix2d::Identity() - half * so2_generator();
}

bool is_rotation(const Eigen::MatrixXd& C, double tol) {
  if (C.rows() != C.cols() || C.rows() == 0) return false;
  if (!C.allFinite()) return false;
  const Eigen::MatrixXd err = C.transpose() * C - Eigen::MatrixXd::Identity(C.rows(), C.cols());
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(C.determinant() - 1.0) <= tol;
}

Eigen::MatrixXd project_to_rotation(const Eigen::MatrixXd& C) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd U = svd.matrixU();
  const Eigen::MatrixXd V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(U.cols() - 1) *= -1.0;
  return U * V.transpose();
}

int so_dim(int d) {
  if (d == 2) return 1;
  if (d == 3) return 3;
  throw Error(ErrorCode::DimensionMismatch, "rotation dimension must be 2 or 3, got " + std::to_string(d));
}

// ---------------------------------------------------------------------------

SEk::SEk(Eigen::MatrixXd rot, Eigen::MatrixXd trans, NoCheck) : rot_(std::move(rot)), trans_(std::move(trans)) {}

SEk::SEk(Eigen::MatrixXd rot, Eigen::MatrixXd trans) : rot_(std::move(rot)), trans_(std::move(trans)) {
  so_dim(static_cast<int>(rot_.rows()));
  if (rot_.cols() != rot_.rows() || trans_.rows() != rot_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "translation block must have d rows");
  }
  check_rotation(rot_);
}

SEk SEk::unchecked(Eigen::MatrixXd rot, Eigen::MatrixXd trans) { return SEk(std::move(rot), std::move(trans), NoCheck{}); }

SEk SEk::identity(int d, int k) {
  so_dim(d);
  return SEk(Eigen::MatrixXd::Identity(d, d), Eigen::MatrixXd::Zero(d, k), NoCheck{});
}

SEk SEk::from_matrix(const Eigen::MatrixXd& X, int d) {
  so_dim(d);
  if (X.rows() != X.cols() || X.rows() < d) {
    throw Error(ErrorCode::MalformedEmbedding, "embedding must be square with side >= d");
  }
  const Eigen::Index k = X.rows() - d;
  if (!(X.bottomLeftCorner(k, d).array() == 0.0).all() ||
      !(X.bottomRightCorner(k, k).array() == Eigen::MatrixXd::Identity(k, k).array()).all()) {
    throw Error(ErrorCode::MalformedEmbedding, "lower blocks must be exactly [0, I]");
  }
  return SEk(X.topLeftCorner(d, d), X.topRightCorner(d, k));
}

Eigen::MatrixXd SEk::matrix() const {
  const int n = d() + k();
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n);
  X.topLeftCorner(d(), d()) = rot_;
  X.topRightCorner(d(), k()) = trans_;
  return X;
}

SEk SEk::operator*(const SEk& other) const {
  if (d() != other.d() || k() != other.k()) {
    throw Error(ErrorCode::DimensionMismatch, "compose: (d, k) differ");
  }
  Eigen::MatrixXd trans = rot_ * other.trans_;
  trans += trans_;
  return SEk(rot_ * other.rot_, std::move(trans), NoCheck{});
}

SEk SEk::inverse() const {
  Eigen::MatrixXd rt = rot_.transpose();
  Eigen::MatrixXd trans = -rt * trans_;
  return SEk(std::move(rt), std::move(trans), NoCheck{});
}

Eigen::MatrixXd wedge_sek(const Eigen::VectorXd& xi, int d, int k) {
  const int r = so_dim(d);
  if (xi.size() != r + k * d) throw Error(ErrorCode::DimensionMismatch, "wedge_sek: tangent length mismatch");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + k, d + k);
  if (d == 3) {
    A.topLeftCorner(3, 3) = wedge_so3(xi.head<3>());
  } else {
    A.topLeftCorner(2, 2) = xi(0) * so2_generator();
  }
  for (int i = 0; i < k; ++i) A.block(0, d + i, d, 1) = xi.segment(r + i * d, d);
  return A;
}

SEk exp_sek(const Eigen::VectorXd& xi, int d, int k) {
  const int r = so_dim(d);
  if (xi.size() != r + k * d) throw Error(ErrorCode::DimensionMismatch, "exp_sek: tangent length mismatch");
  Eigen::MatrixXd rot;
  Eigen::MatrixXd J;
  if (d == 3) {
    const Eigen::Vector3d phi = xi.head<3>();
    rot = exp_so3(phi);
    if (k > 0) J = left_jacobian_so3(phi);
  } else {
    rot = exp_so2(xi(0));
    if (k > 0) J = left_jacobian_so2(xi(0));
  }
  Eigen::MatrixXd trans(d, k);
  for (int i = 0; i < k; ++i) trans.col(i) = J * xi.segment(r + i * d, d);
  return SEk::unchecked(std::move(rot), std::move(trans));
}

Eigen::VectorXd log_sek(const SEk& X) {
  const int d = X.d();
  const int k = X.k();
  const int r = so_dim(d);
  Eigen::VectorXd xi(X.dof());
  Eigen::MatrixXd Jinv;
  if (d == 3) {
    const Eigen::Vector3d phi = log_so3(X.rot());
    xi.head<3>() = phi;
    if (k > 0) Jinv = inv_left_jacobian_so3(phi);
  } else {
    const double theta = log_so2(X.rot());
    xi(0) = theta;
    if (k > 0) Jinv = inv_left_jacobian_so2(theta);
  }
  for (int i = 0; i < k; ++i) xi.segment(r + i * d, d) = Jinv * X.trans().col(i);
  return xi;
}

SEk compose(const SEk& X, const SEk& Y) { return X * Y; }

SEk inverse(const SEk& X) { return X.inverse(); }

}  // namespace ukfm
