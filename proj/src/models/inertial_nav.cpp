#include <cmath>
#include <numbers>

#include "ukfm/models/models.hpp"

namespace ukfm {

LandmarkSet default_nav_landmarks() {
  return {Eigen::Vector3d(0.0, 2.0, 2.0), Eigen::Vector3d(-2.0, -2.0, -2.0), Eigen::Vector3d(2.0, -2.0, -2.0)};
}

Eigen::VectorXd observe_landmarks(const SEk& state, const LandmarkSet& landmarks) {
  const Eigen::Matrix3d Ct = state.rot().transpose();
  const Eigen::Vector3d p = state.trans().col(1);
  Eigen::VectorXd y(3 * landmarks.size());
  for (std::size_t i = 0; i < landmarks.size(); ++i) y.segment<3>(3 * i) = Ct * (landmarks[i].head<3>() - p);
  return y;
}

ModelSpec<SEk> inertial_nav(const ModelParams& params) {
  const double deg = std::numbers::pi / 180.0;
  const auto p = resolve_params({{"gyro_std", 0.01},
                                 {"acc_std", 0.01},
                                 {"obs_std", 0.1},
                                 {"obs_period", 10},
                                 {"radius", 5.0},
                                 {"lap_time", 30.0},
                                 {"init_yaw_err_deg", 45.0},
                                 {"init_pos_err", 1.0},
                                 {"p0_tilt_std_deg", 1.0},
                                 {"p0_vel_std", 0.1}},
                                params, "inertial_nav");
  const double dt = params.dt.value_or(0.01);
  const LandmarkSet landmarks = params.landmarks.value_or(default_nav_landmarks());
  for (const auto& l : landmarks) {
    if (l.size() != 3) throw Error(ErrorCode::InvalidConfig, "inertial_nav landmarks must be 3D");
  }
  if (landmarks.empty()) throw Error(ErrorCode::InvalidConfig, "inertial_nav needs at least one landmark");

  ModelSpec<SEk> m;
  m.name = "inertial_nav";
  m.filter.dt = dt;
  m.filter.f = [](const SEk& x, const Eigen::VectorXd& imu, const Eigen::VectorXd& w, double step) {
    return inertial_step(x, imu.head<3>() + w.head<3>(), imu.segment<3>(3) + w.segment<3>(3), step);
  };
  m.filter.h = [landmarks](const SEk& x) { return observe_landmarks(x, landmarks); };
  Eigen::VectorXd q(6);
  q << Eigen::Vector3d::Constant(std::pow(p.at("gyro_std"), 2)), Eigen::Vector3d::Constant(std::pow(p.at("acc_std"), 2));
  m.filter.Q = q.asDiagonal();
  m.filter.R = std::pow(p.at("obs_std"), 2) * Eigen::MatrixXd::Identity(3 * landmarks.size(), 3 * landmarks.size());
  m.filter.normalize = normalize_rotation;
  m.measurement_period = static_cast<int>(p.at("obs_period"));

  m.retractions = {componentwise_retraction(9), left_retraction(9), right_retraction(9)};
  m.retractions[0].name = "so3xr6";
  m.retractions[1].name = "se23_left";
  m.retractions[2].name = "se23_right";
  m.chart = m.retractions[0];

  // Counter-clockwise circle centred on the origin, heading along the tangent.
  const double radius = p.at("radius");
  const double yaw_rate = 2.0 * std::numbers::pi / p.at("lap_time");
  const double speed = radius * yaw_rate;
  Eigen::MatrixXd trans(3, 2);
  trans.col(0) = Eigen::Vector3d(speed, 0.0, 0.0);
  trans.col(1) = Eigen::Vector3d(0.0, -radius, 0.0);
  m.truth0 = SEk(Eigen::Matrix3d::Identity(), trans);

  const double yaw_err = p.at("init_yaw_err_deg") * deg;
  Eigen::MatrixXd trans_hat = trans;
  trans_hat.col(1) += Eigen::Vector3d(p.at("init_pos_err"), 0.0, 0.0);
  m.initial.mean = SEk(rot_z(yaw_err), trans_hat);
  Eigen::VectorXd p0(9);
  const double tilt = p.at("p0_tilt_std_deg") * deg;
  p0 << tilt * tilt, tilt * tilt, yaw_err * yaw_err, Eigen::Vector3d::Constant(std::pow(p.at("p0_vel_std"), 2)),
      Eigen::Vector3d::Constant(std::pow(p.at("init_pos_err"), 2));
  m.initial.cov = p0.asDiagonal();

  Eigen::VectorXd imu(6);
  imu << 0.0, 0.0, yaw_rate, 0.0, speed * yaw_rate, -kGravity(2);
  m.inputs = [imu](int steps) { return std::vector<Eigen::VectorXd>(steps, imu); };

  m.state_columns = {"roll", "pitch", "yaw", "vx", "vy", "vz", "px", "py", "pz"};
  m.state_values = [](const SEk& x) {
    const Eigen::Vector3d rpy = rpy_from_rotation(x.rot());
    const auto& t = x.trans();
    return std::vector<double>{rpy(0), rpy(1), rpy(2), t(0, 0), t(1, 0), t(2, 0), t(0, 1), t(1, 1), t(2, 1)};
  };
  m.error_blocks = {"rot", "vel", "pos"};
  m.block_errors = [](const SEk& truth, const SEk& est) {
    return Eigen::Vector3d(rotation_angle(est.rot(), truth.rot()), (truth.trans().col(0) - est.trans().col(0)).norm(),
                           (truth.trans().col(1) - est.trans().col(1)).norm())
        .eval();
  };
  return m;
}

}  // namespace ukfm
