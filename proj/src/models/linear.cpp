#include <cmath>

#include "ukfm/models/models.hpp"

namespace ukfm {

ModelSpec<Eigen::VectorXd> linear_model(const ModelParams& params) {
  const auto p = resolve_params({{"pos_std", 0.05},
                                 {"vel_std", 0.1},
                                 {"obs_std", 0.5},
                                 {"p0_pos_std", 1.0},
                                 {"p0_vel_std", 0.5}},
                                params, "linear");
  const double dt = params.dt.value_or(0.1);

  Eigen::Matrix2d F;
  F << 1.0, dt, 0.0, 1.0;
  const Eigen::Vector2d B(0.5 * dt * dt, dt);

  ModelSpec<Eigen::VectorXd> m;
  m.name = "linear";
  m.filter.dt = dt;
  m.filter.f = [F, B](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w, double) {
    Eigen::VectorXd out = F * x + B * u(0);
    out += w;
    return out;
  };
  m.filter.h = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, x(0)); };
  m.filter.Q = Eigen::Vector2d(p.at("pos_std") * p.at("pos_std"), p.at("vel_std") * p.at("vel_std")).asDiagonal();
  m.filter.R = Eigen::MatrixXd::Constant(1, 1, p.at("obs_std") * p.at("obs_std"));
  m.measurement_period = 1;

  m.retractions = {additive_retraction()};
  m.chart = m.retractions.front();

  m.truth0 = Eigen::Vector2d(0.0, 1.0);
  m.initial.mean = m.truth0;
  m.initial.cov = Eigen::Vector2d(p.at("p0_pos_std") * p.at("p0_pos_std"), p.at("p0_vel_std") * p.at("p0_vel_std"))
                      .asDiagonal();
  m.inputs = [dt](int steps) {
    std::vector<Eigen::VectorXd> u(steps);
    for (int i = 0; i < steps; ++i) u[i] = Eigen::VectorXd::Constant(1, std::sin(0.5 * i * dt));
    return u;
  };
  const GaussianSampler init(m.initial.cov);
  m.draw_truth0 = [init](const Eigen::VectorXd& nominal, CounterRng& rng) -> Eigen::VectorXd {
    return nominal + init.sample(rng);
  };

  m.state_columns = {"pos", "vel"};
  m.state_values = [](const Eigen::VectorXd& x) { return std::vector<double>{x(0), x(1)}; };
  m.error_blocks = {"pos", "vel"};
  m.block_errors = [](const Eigen::VectorXd& truth, const Eigen::VectorXd& est) {
    return Eigen::Vector2d(std::abs(truth(0) - est(0)), std::abs(truth(1) - est(1))).eval();
  };
  return m;
}

}  // namespace ukfm
