#include <cmath>

#include "ukfm/models/models.hpp"

namespace ukfm {

ModelSpec<SEk> localization2d(const ModelParams& params) {
  const auto p = resolve_params({{"speed", 1.0},
                                 {"yaw_rate", 0.2},
                                 {"odo_speed_std", 0.05},
                                 {"odo_lateral_std", 0.05},
                                 {"odo_yaw_rate_std", 0.0175},
                                 {"gnss_std", 1.0},
                                 {"gnss_period", 20},
                                 {"p0_heading_std", 0.05},
                                 {"p0_pos_std", 0.5}},
                                params, "localization2d");
  const double dt = params.dt.value_or(0.05);

  ModelSpec<SEk> m;
  m.name = "localization2d";
  m.filter.dt = dt;
  m.filter.f = [](const SEk& x, const Eigen::VectorXd& odo, const Eigen::VectorXd& w, double) {
    return odometry_step(x, odo.head<3>() + w.head<3>());
  };
  m.filter.h = [](const SEk& x) -> Eigen::VectorXd { return x.trans().col(0); };
  const Eigen::Vector3d odo_std(p.at("odo_yaw_rate_std") * dt, p.at("odo_speed_std") * dt,
                                p.at("odo_lateral_std") * dt);
  m.filter.Q = odo_std.cwiseAbs2().asDiagonal();
  m.filter.R = std::pow(p.at("gnss_std"), 2) * Eigen::MatrixXd::Identity(2, 2);
  m.filter.normalize = normalize_rotation;
  m.measurement_period = static_cast<int>(p.at("gnss_period"));

  m.retractions = {left_retraction(3), right_retraction(3)};
  m.chart = componentwise_retraction(3);

  m.truth0 = SEk::identity(2, 1);
  m.initial.mean = m.truth0;
  m.initial.cov = Eigen::Vector3d(std::pow(p.at("p0_heading_std"), 2), std::pow(p.at("p0_pos_std"), 2),
                                  std::pow(p.at("p0_pos_std"), 2))
                      .asDiagonal();
  const Eigen::Vector3d odo(p.at("yaw_rate") * dt, p.at("speed") * dt, 0.0);
  m.inputs = [odo](int steps) { return std::vector<Eigen::VectorXd>(steps, odo); };
  const GaussianSampler init(m.initial.cov);
  m.draw_truth0 = [init](const SEk& nominal, CounterRng& rng) { return phi_componentwise(nominal, init.sample(rng)); };

  m.state_columns = {"theta", "x", "y"};
  m.state_values = [](const SEk& x) {
    return std::vector<double>{std::atan2(x.rot()(1, 0), x.rot()(0, 0)), x.trans()(0, 0), x.trans()(1, 0)};
  };
  m.error_blocks = {"heading", "pos"};
  m.block_errors = [](const SEk& truth, const SEk& est) {
    return Eigen::Vector2d(rotation_angle(est.rot(), truth.rot()), (truth.trans() - est.trans()).norm()).eval();
  };
  return m;
}

}  // namespace ukfm
