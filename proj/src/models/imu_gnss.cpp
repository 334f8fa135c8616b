#include <cmath>
#include <numbers>

#include "ukfm/models/models.hpp"

namespace ukfm {

MixedState imu_gnss_step(const MixedState& state, const Eigen::VectorXd& imu, const Eigen::VectorXd& w, double dt) {
  const Eigen::Vector3d bg = state.euclid.head<3>();
  const Eigen::Vector3d ba = state.euclid.tail<3>();
  const Eigen::Vector3d gyro = imu.head<3>() - bg + w.head<3>();
  const Eigen::Vector3d acc = imu.segment<3>(3) - ba + w.segment<3>(3);
  return MixedState{inertial_step(state.group, gyro, acc, dt), state.euclid + w.segment<6>(6)};
}

ModelSpec<MixedState> imu_gnss(const ModelParams& params) {
  const double deg = std::numbers::pi / 180.0;
  const auto p = resolve_params({{"gyro_std", 0.01},
                                 {"acc_std", 0.05},
                                 {"gyro_bias_rw", 1e-5},
                                 {"acc_bias_rw", 1e-4},
                                 {"gnss_std", 0.5},
                                 {"gnss_period", 10},
                                 {"radius", 10.0},
                                 {"lap_time", 40.0},
                                 {"p0_tilt_std_deg", 1.0},
                                 {"p0_yaw_std_deg", 5.0},
                                 {"p0_vel_std", 0.1},
                                 {"p0_pos_std", 0.5},
                                 {"p0_gyro_bias_std", 0.005},
                                 {"p0_acc_bias_std", 0.05}},
                                params, "imu_gnss");
  const double dt = params.dt.value_or(0.01);

  ModelSpec<MixedState> m;
  m.name = "imu_gnss";
  m.filter.dt = dt;
  m.filter.f = imu_gnss_step;
  m.filter.h = [](const MixedState& x) -> Eigen::VectorXd { return x.group.trans().col(1); };
  Eigen::VectorXd q(12);
  q << Eigen::Vector3d::Constant(std::pow(p.at("gyro_std"), 2)), Eigen::Vector3d::Constant(std::pow(p.at("acc_std"), 2)),
      Eigen::Vector3d::Constant(std::pow(p.at("gyro_bias_rw"), 2)),
      Eigen::Vector3d::Constant(std::pow(p.at("acc_bias_rw"), 2));
  m.filter.Q = q.asDiagonal();
  m.filter.R = std::pow(p.at("gnss_std"), 2) * Eigen::MatrixXd::Identity(3, 3);
  m.filter.normalize = [](MixedState& x) { normalize_rotation(x.group); };
  m.measurement_period = static_cast<int>(p.at("gnss_period"));

  m.retractions = {mixed_retraction(Side::Right, 15), mixed_retraction(Side::Left, 15)};
  m.retractions[0].name = "right";
  m.retractions[1].name = "left";
  m.chart = Retraction<MixedState>{
      "componentwise",
      [](const MixedState& ref, const Eigen::VectorXd& xi) {
        return MixedState{phi_componentwise(ref.group, xi.head<9>()), ref.euclid + xi.tail<6>()};
      },
      [](const MixedState& ref, const MixedState& x) {
        Eigen::VectorXd xi(15);
        xi << phi_inv_componentwise(ref.group, x.group), x.euclid - ref.euclid;
        return xi;
      },
      15};

  const double radius = p.at("radius");
  const double yaw_rate = 2.0 * std::numbers::pi / p.at("lap_time");
  const double speed = radius * yaw_rate;
  Eigen::MatrixXd trans(3, 2);
  trans.col(0) = Eigen::Vector3d(speed, 0.0, 0.0);
  trans.col(1) = Eigen::Vector3d(0.0, -radius, 0.0);
  m.truth0 = MixedState{SEk(Eigen::Matrix3d::Identity(), trans), Eigen::VectorXd::Zero(6)};
  m.initial.mean = m.truth0;

  Eigen::VectorXd p0(15);
  const double tilt = p.at("p0_tilt_std_deg") * deg;
  const double yaw = p.at("p0_yaw_std_deg") * deg;
  p0 << tilt * tilt, tilt * tilt, yaw * yaw, Eigen::Vector3d::Constant(std::pow(p.at("p0_vel_std"), 2)),
      Eigen::Vector3d::Constant(std::pow(p.at("p0_pos_std"), 2)),
      Eigen::Vector3d::Constant(std::pow(p.at("p0_gyro_bias_std"), 2)),
      Eigen::Vector3d::Constant(std::pow(p.at("p0_acc_bias_std"), 2));
  m.initial.cov = p0.asDiagonal();

  // The vehicle circles with a slow vertical oscillation.
  m.inputs = [yaw_rate, speed, dt](int steps) {
    std::vector<Eigen::VectorXd> u(steps);
    for (int i = 0; i < steps; ++i) {
      const double t = i * dt;
      Eigen::VectorXd imu(6);
      imu << 0.0, 0.0, yaw_rate, 0.0, speed * yaw_rate, -kGravity(2) + 0.5 * std::cos(0.5 * t);
      u[i] = imu;
    }
    return u;
  };
  const Retraction<MixedState> chart = m.chart;
  const GaussianSampler init(m.initial.cov);
  m.draw_truth0 = [chart, init](const MixedState& nominal, CounterRng& rng) {
    return chart.phi(nominal, init.sample(rng));
  };

  m.state_columns = {"roll", "pitch", "yaw", "vx", "vy", "vz", "px", "py", "pz", "bgx", "bgy", "bgz", "bax", "bay", "baz"};
  m.state_values = [](const MixedState& x) {
    const Eigen::Vector3d rpy = rpy_from_rotation(x.group.rot());
    const auto& t = x.group.trans();
    std::vector<double> v{rpy(0), rpy(1), rpy(2), t(0, 0), t(1, 0), t(2, 0), t(0, 1), t(1, 1), t(2, 1)};
    for (int i = 0; i < 6; ++i) v.push_back(x.euclid(i));
    return v;
  };
  m.error_blocks = {"rot", "vel", "pos", "gyro_bias", "acc_bias"};
  m.block_errors = [](const MixedState& truth, const MixedState& est) {
    Eigen::VectorXd e(5);
    e << rotation_angle(est.group.rot(), truth.group.rot()),
        (truth.group.trans().col(0) - est.group.trans().col(0)).norm(),
        (truth.group.trans().col(1) - est.group.trans().col(1)).norm(),
        (truth.euclid.head<3>() - est.euclid.head<3>()).norm(), (truth.euclid.tail<3>() - est.euclid.tail<3>()).norm();
    return e;
  };
  return m;
}

}  // namespace ukfm
