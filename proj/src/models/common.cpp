#include <cmath>

#include "ukfm/error.hpp"
#include "ukfm/models/models.hpp"

namespace ukfm {

std::map<std::string, double> resolve_params(const std::map<std::string, double>& defaults, const ModelParams& params,
                                             const std::string& model) {
  std::map<std::string, double> out = defaults;
  for (const auto& [key, value] : params.values) {
    auto it = out.find(key);
    if (it == out.end()) {
      std::string known;
      for (const auto& [k, v] : defaults) known += (known.empty() ? "" : ", ") + k;
      throw Error(ErrorCode::InvalidConfig, "model " + model + " has no parameter '" + key + "' (known: " + known + ")");
    }
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidConfig, "parameter '" + key + "' must be finite");
    it->second = value;
  }
  return out;
}

SEk odometry_step(const SEk& pose, const Eigen::Vector3d& increment) { return pose * exp_sek(increment, 2, 1); }

SEk inertial_step(const SEk& state, const Eigen::Vector3d& gyro, const Eigen::Vector3d& acc, double dt) {
  const Eigen::Matrix3d C = state.rot();
  const Eigen::Vector3d v = state.trans().col(0);
  const Eigen::Vector3d p = state.trans().col(1);
  Eigen::MatrixXd trans(3, 2);
  trans.col(0) = v + (C * acc + kGravity) * dt;
  trans.col(1) = p + v * dt;
  return SEk::unchecked(C * exp_so3(gyro * dt), std::move(trans));
}

Eigen::Vector3d rpy_from_rotation(const Eigen::Matrix3d& C) {
  const double roll = std::atan2(C(2, 1), C(2, 2));
  const double pitch = std::atan2(-C(2, 0), std::hypot(C(2, 1), C(2, 2)));
  const double yaw = std::atan2(C(1, 0), C(0, 0));
  return {roll, pitch, yaw};
}

Eigen::Matrix3d rot_z(double yaw) { return exp_so3(Eigen::Vector3d(0.0, 0.0, yaw)); }

double rotation_angle(const Eigen::MatrixXd& Ra, const Eigen::MatrixXd& Rb) {
  const Eigen::MatrixXd A = Ra.transpose() * Rb;
  if (A.rows() == 2) return std::abs(std::atan2(A(1, 0), A(0, 0)));
  const double s = 0.5 * Eigen::Vector3d(A(2, 1) - A(1, 2), A(0, 2) - A(2, 0), A(1, 0) - A(0, 1)).norm();
  const double c = 0.5 * (A.trace() - 1.0);
  return std::atan2(s, c);
}

void normalize_rotation(SEk& X) { X = SEk::unchecked(project_to_rotation(X.rot()), X.trans()); }

}  // namespace ukfm
