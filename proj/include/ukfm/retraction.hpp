#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ukfm/lie_groups.hpp"

namespace ukfm {

/// A retraction phi(ref, xi) and its local inverse phi_inv(ref, x), with
/// phi(ref, 0) == ref and identity Jacobian at xi = 0.
template <class State>
struct Retraction {
  std::string name;
  std::function<State(const State&, const Eigen::VectorXd&)> phi;
  std::function<Eigen::VectorXd(const State&, const State&)> phi_inv;
  /// Tangent dimension, or -1 when it depends on the state (e.g. a SLAM map).
  int dim = -1;

  int dimension(const State& ref) const { return dim >= 0 ? dim : static_cast<int>(phi_inv(ref, ref).size()); }
};

enum class Side { Left, Right };

// ---------------------------------------------------------------------------
// Lie group retractions on SE_k(d).

/// ref * exp(xi)
SEk phi_left(const SEk& ref, const Eigen::VectorXd& xi);
/// log(ref^-1 * x)
Eigen::VectorXd phi_inv_left(const SEk& ref, const SEk& x);
/// exp(xi) * ref
SEk phi_right(const SEk& ref, const Eigen::VectorXd& xi);
/// log(x * ref^-1)
Eigen::VectorXd phi_inv_right(const SEk& ref, const SEk& x);

/// Treats SE_k(3) as SO(3) x R^{3k}: rotation right-multiplied by exp, the
/// translation columns shifted additively.
SEk phi_componentwise(const SEk& ref, const Eigen::VectorXd& xi);
Eigen::VectorXd phi_inv_componentwise(const SEk& ref, const SEk& x);

// ---------------------------------------------------------------------------
// Product state G x R^N.

struct MixedState {
  SEk group;
  Eigen::VectorXd euclid;

  int dof() const { return group.dof() + static_cast<int>(euclid.size()); }
};

/// Group part by left/right multiplication, Euclidean part by addition.
MixedState phi_mixed(const MixedState& ref, const Eigen::VectorXd& xi, Side side);
Eigen::VectorXd phi_inv_mixed(const MixedState& ref, const MixedState& x, Side side);

// ---------------------------------------------------------------------------
// 2-sphere lifted to SO(3): x = rot * lever.

struct SphereLiftedState {
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d lever = Eigen::Vector3d::UnitZ();

  Eigen::Vector3d point() const { return rot * lever; }
};

/// Lifted sphere dynamics x' = omega * x, i.e. R' = omega * R.
Eigen::Matrix3d lift_sphere_dynamics(const Eigen::Matrix3d& R, const Eigen::Matrix3d& omega);

SphereLiftedState phi_sphere(const SphereLiftedState& ref, const Eigen::Vector3d& xi, Side side);
Eigen::Vector3d phi_inv_sphere(const SphereLiftedState& ref, const SphereLiftedState& x, Side side);

struct SphereGaussian {
  Eigen::Vector3d mean;
  Eigen::Matrix3d cov;
};

/// Linearized distribution of R L under R = exp(xi^) R_hat, xi ~ N(0, P):
/// N(R_hat L, A P A^T) with A = -(R_hat L)^. Throws NonPSDCovariance.
SphereGaussian covariance_retrieval(const Eigen::Matrix3d& R_hat, const Eigen::Vector3d& lever, const Eigen::Matrix3d& P);

// ---------------------------------------------------------------------------
// Registered retractions.

Retraction<Eigen::VectorXd> additive_retraction();
Retraction<SEk> left_retraction(int dim);
Retraction<SEk> right_retraction(int dim);
Retraction<SEk> componentwise_retraction(int dim);
Retraction<MixedState> mixed_retraction(Side side, int dim = -1);
Retraction<SphereLiftedState> sphere_retraction(Side side);

/// Bit-exact state equality, used to check phi(ref, 0) == ref.
bool exactly_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
bool exactly_equal(const SEk& a, const SEk& b);
bool exactly_equal(const MixedState& a, const MixedState& b);
bool exactly_equal(const SphereLiftedState& a, const SphereLiftedState& b);

// ---------------------------------------------------------------------------
// Validation of user-supplied retractions.

struct EpsilonCheck {
  double epsilon = 0.0;
  double residual = 0.0;  ///< max over directions of ||phi_inv(ref, phi(ref, eps u)) - eps u||
  double ratio = 0.0;     ///< residual / eps^2
  bool pass = false;
};

struct RetractionReport {
  std::string name;
  bool identity_exact = false;  ///< phi(ref, 0) == ref bit for bit
  bool zero_inverse = false;    ///< ||phi_inv(ref, ref)|| <= kResidualFloor
  std::vector<EpsilonCheck> epsilons;
  double jacobian_error = 0.0;  ///< max |J - I| of the finite-difference Jacobian at xi = 0
  bool jacobian_pass = false;

  bool pass() const {
    bool ok = identity_exact && zero_inverse && jacobian_pass;
    for (const auto& e : epsilons) ok = ok && e.pass;
    return ok;
  }
};

inline constexpr double kResidualFloor = 1e-10;
inline constexpr double kResidualRatioBound = 10.0;
inline constexpr double kJacobianStep = 1e-5;
inline constexpr double kJacobianTol = 1e-6;

/// Second-order consistency test: at each eps, the inverse-pair residual must
/// stay below kResidualFloor + kResidualRatioBound * eps^2. The Jacobian of
/// xi -> phi_inv(ref, phi(ref, xi)) is taken by central differences at 0 and
/// must be the identity within kJacobianTol. `directions` holds unit vectors
/// (one per column).
template <class State>
RetractionReport check_retraction(const Retraction<State>& r, const State& ref, std::span<const double> epsilons,
                                  const Eigen::MatrixXd& directions) {
  RetractionReport report;
  report.name = r.name;
  const int n = r.dimension(ref);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);

  report.identity_exact = exactly_equal(r.phi(ref, zero), ref);
  report.zero_inverse = r.phi_inv(ref, ref).norm() <= kResidualFloor;

  for (double eps : epsilons) {
    EpsilonCheck c;
    c.epsilon = eps;
    for (Eigen::Index j = 0; j < directions.cols(); ++j) {
      const Eigen::VectorXd xi = eps * directions.col(j);
      const double res = (r.phi_inv(ref, r.phi(ref, xi)) - xi).norm();
      c.residual = std::max(c.residual, res);
    }
    c.ratio = c.residual / (eps * eps);
    c.pass = c.residual <= kResidualFloor + kResidualRatioBound * eps * eps;
    report.epsilons.push_back(c);
  }

  Eigen::MatrixXd J(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(n);
    dx(j) = kJacobianStep;
    J.col(j) = (r.phi_inv(ref, r.phi(ref, dx)) - r.phi_inv(ref, r.phi(ref, -dx))) / (2.0 * kJacobianStep);
  }
  report.jacobian_error = (J - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  report.jacobian_pass = report.jacobian_error <= kJacobianTol;
  return report;
}

}  // namespace ukfm
