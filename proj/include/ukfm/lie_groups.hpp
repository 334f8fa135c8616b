#pragma once

#include <Eigen/Dense>

namespace ukfm {

// Tolerances for rotation / embedding validation.
inline constexpr double kRotationTol = 1e-9;
// log is refused when the angle is within this margin of pi.
inline constexpr double kNearPiMargin = 1e-6;
// Below this angle, trigonometric coefficients use their Taylor expansions.
inline constexpr double kSmallAngle = 1e-4;

// ---------------------------------------------------------------------------
// SO(3)

/// Skew-symmetric matrix such that wedge_so3(w) * v == w.cross(v).
Eigen::Matrix3d wedge_so3(const Eigen::Vector3d& w);

/// Inverse of wedge_so3. Throws NonSkewInput if ||M + M^T|| > 1e-9.
Eigen::Vector3d vee_so3(const Eigen::Matrix3d& M);

/// Rodrigues formula.
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w);

/// Principal logarithm. Throws NotARotation or NearPiRotation.
Eigen::Vector3d log_so3(const Eigen::Matrix3d& C);

Eigen::Matrix3d left_jacobian_so3(const Eigen::Vector3d& w);
Eigen::Matrix3d inv_left_jacobian_so3(const Eigen::Vector3d& w);

// ---------------------------------------------------------------------------
// SO(2)

Eigen::Matrix2d exp_so2(double theta);
/// Throws NotARotation or NearPiRotation.
double log_so2(const Eigen::Matrix2d& C);
Eigen::Matrix2d left_jacobian_so2(double theta);
Eigen::Matrix2d inv_left_jacobian_so2(double theta);

// ---------------------------------------------------------------------------
// Rotation helpers shared by d = 2 and d = 3.

/// Orthogonality and determinant check, both within `tol`.
bool is_rotation(const Eigen::MatrixXd& C, double tol = kRotationTol);

/// Nearest rotation in Frobenius norm (polar decomposition via SVD).
Eigen::MatrixXd project_to_rotation(const Eigen::MatrixXd& C);

/// Dimension of SO(d): 1 for d = 2, 3 for d = 3.
int so_dim(int d);

// ---------------------------------------------------------------------------
// SE_k(d): one rotation block and k translation-like columns.

/// Element of SE_k(d), embedded as [[C, p_1 ... p_k], [0, I_k]].
/// d is 2 or 3; k >= 0. SE_0(3) is SO(3), SE_1(d) is SE(d), SE_2(3) is the
/// extended pose (orientation, velocity, position).
class SEk {
 public:
  /// Identity of SO(3).
  SEk() : rot_(Eigen::Matrix3d::Identity()), trans_(3, 0) {}

  /// Validates the rotation block; throws NotARotation / DimensionMismatch.
  SEk(Eigen::MatrixXd rot, Eigen::MatrixXd trans);

  static SEk identity(int d, int k);

  /// Parses a (d+k)x(d+k) embedding; throws MalformedEmbedding if the lower
  /// blocks are not exactly [0, I_k].
  static SEk from_matrix(const Eigen::MatrixXd& X, int d);

  int d() const { return static_cast<int>(rot_.rows()); }
  int k() const { return static_cast<int>(trans_.cols()); }
  /// Tangent dimension so_dim(d) + k*d.
  int dof() const { return so_dim(d()) + k() * d(); }

  const Eigen::MatrixXd& rot() const { return rot_; }
  const Eigen::MatrixXd& trans() const { return trans_; }
  Eigen::VectorXd col(int i) const { return trans_.col(i); }

  Eigen::MatrixXd matrix() const;

  SEk operator*(const SEk& other) const;
  /// Closed form (C^T, -C^T p_i).
  SEk inverse() const;

  /// Skips validation; for results that are rotations by construction.
  static SEk unchecked(Eigen::MatrixXd rot, Eigen::MatrixXd trans);

 private:
  struct NoCheck {};
  SEk(Eigen::MatrixXd rot, Eigen::MatrixXd trans, NoCheck);

  Eigen::MatrixXd rot_;
  Eigen::MatrixXd trans_;
};

/// Lie algebra element of SE_k(d) for tangent coordinates ordered as
/// (rotation part, p_1, ..., p_k).
Eigen::MatrixXd wedge_sek(const Eigen::VectorXd& xi, int d, int k);

/// Closed form exponential: rotation block exp_so(phi), translation columns
/// J(phi) * p_i with J the left Jacobian of SO(d).
SEk exp_sek(const Eigen::VectorXd& xi, int d, int k);
/// Throws NearPiRotation.
Eigen::VectorXd log_sek(const SEk& X);

/// Throws DimensionMismatch when (d, k) differ.
SEk compose(const SEk& X, const SEk& Y);
SEk inverse(const SEk& X);

}  // namespace ukfm
