#include "ukfm/retraction.hpp"

#include <Eigen/Eigenvalues>

#include "ukfm/error.hpp"

namespace ukfm {

namespace {

void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": expected length " + std::to_string(want) + ", got " + std::to_string(got));
  }
}

SEk group_phi(const SEk& ref, const Eigen::VectorXd& xi, Side side) {
  return side == Side::Left ? phi_left(ref, xi) : phi_right(ref, xi);
}

Eigen::VectorXd group_phi_inv(const SEk& ref, const SEk& x, Side side) {
  return side == Side::Left ? phi_inv_left(ref, x) : phi_inv_right(ref, x);
}

Eigen::MatrixXd rot_times_exp(const Eigen::MatrixXd& rot, const Eigen::VectorXd& phi) {
  if (rot.rows() == 3) return rot * exp_so3(phi.head<3>());
  return rot * exp_so2(phi(0));
}

Eigen::VectorXd log_rot(const Eigen::MatrixXd& rot) {
  if (rot.rows() == 3) return log_so3(rot);
  return Eigen::VectorXd::Constant(1, log_so2(rot));
}

}  // namespace

SEk phi_left(const SEk& ref, const Eigen::VectorXd& xi) {
  check_dim(xi.size(), ref.dof(), "phi_left");
  return ref * exp_sek(xi, ref.d(), ref.k());
}

Eigen::VectorXd phi_inv_left(const SEk& ref, const SEk& x) { return log_sek(ref.inverse() * x); }

SEk phi_right(const SEk& ref, const Eigen::VectorXd& xi) {
  check_dim(xi.size(), ref.dof(), "phi_right");
  return exp_sek(xi, ref.d(), ref.k()) * ref;
}

Eigen::VectorXd phi_inv_right(const SEk& ref, const SEk& x) { return log_sek(x * ref.inverse()); }

SEk phi_componentwise(const SEk& ref, const Eigen::VectorXd& xi) {
  check_dim(xi.size(), ref.dof(), "phi_componentwise");
  const int r = so_dim(ref.d());
  Eigen::MatrixXd trans = ref.trans();
  trans += xi.tail(xi.size() - r).reshaped(ref.d(), ref.k());
  return SEk::unchecked(rot_times_exp(ref.rot(), xi.head(r)), std::move(trans));
}

Eigen::VectorXd phi_inv_componentwise(const SEk& ref, const SEk& x) {
  if (ref.d() != x.d() || ref.k() != x.k()) throw Error(ErrorCode::DimensionMismatch, "phi_inv_componentwise");
  const int r = so_dim(ref.d());
  Eigen::VectorXd xi(ref.dof());
  xi.head(r) = log_rot(ref.rot().transpose() * x.rot());
  const Eigen::MatrixXd dt = x.trans() - ref.trans();
  xi.tail(xi.size() - r) = dt.reshaped();
  return xi;
}

MixedState phi_mixed(const MixedState& ref, const Eigen::VectorXd& xi, Side side) {
  check_dim(xi.size(), ref.dof(), "phi_mixed");
  const int g = ref.group.dof();
  return MixedState{group_phi(ref.group, xi.head(g), side), ref.euclid + xi.tail(xi.size() - g)};
}

Eigen::VectorXd phi_inv_mixed(const MixedState& ref, const MixedState& x, Side side) {
  check_dim(x.euclid.size(), ref.euclid.size(), "phi_inv_mixed");
  const int g = ref.group.dof();
  Eigen::VectorXd xi(ref.dof());
  xi.head(g) = group_phi_inv(ref.group, x.group, side);
  xi.tail(ref.euclid.size()) = x.euclid - ref.euclid;
  return xi;
}

Eigen::Matrix3d lift_sphere_dynamics(const Eigen::Matrix3d& R, const Eigen::Matrix3d& omega) { return omega * R; }

SphereLiftedState phi_sphere(const SphereLiftedState& ref, const Eigen::Vector3d& xi, Side side) {
  const Eigen::Matrix3d E = exp_so3(xi);
  return SphereLiftedState{side == Side::Left ? Eigen::Matrix3d(ref.rot * E) : Eigen::Matrix3d(E * ref.rot), ref.lever};
}

Eigen::Vector3d phi_inv_sphere(const SphereLiftedState& ref, const SphereLiftedState& x, Side side) {
  if (side == Side::Left) return log_so3(ref.rot.transpose() * x.rot);
  return log_so3(x.rot * ref.rot.transpose());
}

SphereGaussian covariance_retrieval(const Eigen::Matrix3d& R_hat, const Eigen::Vector3d& lever, const Eigen::Matrix3d& P) {
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::NonPSDCovariance, "covariance_retrieval: P is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(P);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw Error(ErrorCode::NonPSDCovariance, "covariance_retrieval: P has a negative eigenvalue");
  }
  const Eigen::Vector3d mean = R_hat * lever;
  const Eigen::Matrix3d A = -wedge_so3(mean);
  Eigen::Matrix3d cov = A * P * A.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return SphereGaussian{mean, cov};
}

// ---------------------------------------------------------------------------

Retraction<Eigen::VectorXd> additive_retraction() {
  return {"additive",
          [](const Eigen::VectorXd& x, const Eigen::VectorXd& xi) -> Eigen::VectorXd {
            check_dim(xi.size(), x.size(), "additive phi");
            return x + xi;
          },
          [](const Eigen::VectorXd& ref, const Eigen::VectorXd& x) -> Eigen::VectorXd { return x - ref; }, -1};
}

Retraction<SEk> left_retraction(int dim) { return {"left", phi_left, phi_inv_left, dim}; }

Retraction<SEk> right_retraction(int dim) { return {"right", phi_right, phi_inv_right, dim}; }

Retraction<SEk> componentwise_retraction(int dim) {
  return {"componentwise", phi_componentwise, phi_inv_componentwise, dim};
}

Retraction<MixedState> mixed_retraction(Side side, int dim) {
  return {side == Side::Left ? "mixed_left" : "mixed_right",
          [side](const MixedState& ref, const Eigen::VectorXd& xi) { return phi_mixed(ref, xi, side); },
          [side](const MixedState& ref, const MixedState& x) { return phi_inv_mixed(ref, x, side); }, dim};
}

Retraction<SphereLiftedState> sphere_retraction(Side side) {
  return {side == Side::Left ? "left" : "right",
          [side](const SphereLiftedState& ref, const Eigen::VectorXd& xi) {
            check_dim(xi.size(), 3, "sphere phi");
            return phi_sphere(ref, xi.head<3>(), side);
          },
          [side](const SphereLiftedState& ref, const SphereLiftedState& x) -> Eigen::VectorXd {
            return phi_inv_sphere(ref, x, side);
          },
          3};
}

bool exactly_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool exactly_equal(const SEk& a, const SEk& b) {
  return a.d() == b.d() && a.k() == b.k() && (a.rot().array() == b.rot().array()).all() &&
         (a.trans().array() == b.trans().array()).all();
}

bool exactly_equal(const MixedState& a, const MixedState& b) {
  return exactly_equal(a.group, b.group) && exactly_equal(a.euclid, b.euclid);
}

bool exactly_equal(const SphereLiftedState& a, const SphereLiftedState& b) {
  return (a.rot.array() == b.rot.array()).all() && (a.lever.array() == b.lever.array()).all();
}

}  // namespace ukfm
