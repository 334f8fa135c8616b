#include <cmath>
#include <numbers>

#include "ukfm/models/models.hpp"

namespace ukfm {

Eigen::Vector3d attitude_mag_field() {
  const double incl = 60.0 * std::numbers::pi / 180.0;
  return {std::cos(incl), 0.0, -std::sin(incl)};
}

ModelSpec<SEk> attitude3d(const ModelParams& params) {
  // gyro_std is a noise density (rad/s/sqrt(Hz)); per-sample std is gyro_std / sqrt(dt).
  const auto p = resolve_params({{"gyro_std", 0.01},
                                 {"acc_std", 0.5},
                                 {"mag_std", 0.05},
                                 {"obs_period", 1},
                                 {"p0_rot_std", 0.17}},
                                params, "attitude3d");
  const double dt = params.dt.value_or(0.01);
  const Eigen::Vector3d mag = attitude_mag_field();

  ModelSpec<SEk> m;
  m.name = "attitude3d";
  m.filter.dt = dt;
  m.filter.f = [](const SEk& C, const Eigen::VectorXd& gyro, const Eigen::VectorXd& w, double step) {
    const Eigen::Vector3d rate = gyro.head<3>() + w.head<3>();
    return SEk::unchecked(C.rot() * exp_so3(rate * step), Eigen::MatrixXd(3, 0));
  };
  m.filter.h = [mag](const SEk& C) {
    Eigen::VectorXd y(6);
    y.head<3>() = C.rot().transpose() * kGravity;
    y.tail<3>() = C.rot().transpose() * mag;
    return y;
  };
  const double gyro_sample_std = p.at("gyro_std") / std::sqrt(dt);
  m.filter.Q = std::pow(gyro_sample_std, 2) * Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd r(6);
  r << Eigen::Vector3d::Constant(std::pow(p.at("acc_std"), 2)), Eigen::Vector3d::Constant(std::pow(p.at("mag_std"), 2));
  m.filter.R = r.asDiagonal();
  m.filter.normalize = normalize_rotation;
  m.measurement_period = static_cast<int>(p.at("obs_period"));

  m.retractions = {left_retraction(3), right_retraction(3)};
  m.chart = right_retraction(3);

  m.truth0 = SEk::identity(3, 0);
  m.initial.mean = m.truth0;
  m.initial.cov = std::pow(p.at("p0_rot_std"), 2) * Eigen::MatrixXd::Identity(3, 3);
  m.inputs = [dt](int steps) {
    std::vector<Eigen::VectorXd> u(steps);
    for (int i = 0; i < steps; ++i) {
      const double t = i * dt;
      u[i] = Eigen::Vector3d(0.3 * std::sin(0.6 * t), 0.2 * std::cos(0.4 * t), 0.1);
    }
    return u;
  };
  const GaussianSampler init(m.initial.cov);
  m.draw_truth0 = [init](const SEk& nominal, CounterRng& rng) { return phi_right(nominal, init.sample(rng)); };

  m.state_columns = {"roll", "pitch", "yaw"};
  m.state_values = [](const SEk& C) {
    const Eigen::Vector3d rpy = rpy_from_rotation(C.rot());
    return std::vector<double>{rpy(0), rpy(1), rpy(2)};
  };
  m.error_blocks = {"rot"};
  m.block_errors = [](const SEk& truth, const SEk& est) {
    return Eigen::VectorXd::Constant(1, rotation_angle(est.rot(), truth.rot()));
  };
  return m;
}

}  // namespace ukfm
