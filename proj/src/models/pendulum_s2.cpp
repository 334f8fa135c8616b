#include <cmath>

#include "ukfm/models/models.hpp"

namespace ukfm {

std::vector<Eigen::VectorXd> pendulum_inputs(const Eigen::Vector3d& x0, const Eigen::Vector3d& v0, double dt,
                                             int steps) {
  // Unit wire: gravity projected on the tangent plane plus the centripetal term.
  std::vector<Eigen::VectorXd> omegas(steps);
  Eigen::Vector3d x = x0.normalized();
  Eigen::Vector3d v = v0 - v0.dot(x) * x;
  for (int i = 0; i < steps; ++i) {
    omegas[i] = x.cross(v);
    const Eigen::Vector3d acc = kGravity - kGravity.dot(x) * x - v.squaredNorm() * x;
    v += acc * dt;
    x = (x + v * dt).normalized();
    v -= v.dot(x) * x;
  }
  return omegas;
}

ModelSpec<SphereLiftedState> pendulum_s2(const ModelParams& params) {
  const auto p = resolve_params({{"process_std", 1e-3},
                                 {"obs_std", 0.05},
                                 {"obs_period", 1},
                                 {"p0_std", 0.1},
                                 {"init_angle", 2.5},
                                 {"init_speed", 1.0}},
                                params, "pendulum_s2");
  const double dt = params.dt.value_or(0.01);

  ModelSpec<SphereLiftedState> m;
  m.name = "pendulum_s2";
  m.filter.dt = dt;
  m.filter.f = [](const SphereLiftedState& s, const Eigen::VectorXd& omega, const Eigen::VectorXd& w, double step) {
    const Eigen::Matrix3d Omega = exp_so3(omega.head<3>() * step) * exp_so3(w.head<3>());
    return SphereLiftedState{lift_sphere_dynamics(s.rot, Omega), s.lever};
  };
  m.filter.h = [](const SphereLiftedState& s) -> Eigen::VectorXd { return s.point().head<2>(); };
  m.filter.Q = std::pow(p.at("process_std"), 2) * Eigen::MatrixXd::Identity(3, 3);
  m.filter.R = std::pow(p.at("obs_std"), 2) * Eigen::MatrixXd::Identity(2, 2);
  m.filter.normalize = [](SphereLiftedState& s) { s.rot = project_to_rotation(s.rot); };
  m.measurement_period = static_cast<int>(p.at("obs_period"));

  m.retractions = {sphere_retraction(Side::Left), sphere_retraction(Side::Right)};
  m.chart = sphere_retraction(Side::Right);

  SphereLiftedState s0;
  s0.rot = exp_so3(Eigen::Vector3d(p.at("init_angle"), 0.0, 0.0));
  s0.lever = Eigen::Vector3d::UnitZ();
  m.truth0 = s0;
  m.initial.mean = s0;
  m.initial.cov = std::pow(p.at("p0_std"), 2) * Eigen::MatrixXd::Identity(3, 3);

  const Eigen::Vector3d x0 = s0.point();
  const Eigen::Vector3d v0(p.at("init_speed"), 0.0, 0.0);
  m.inputs = [x0, v0, dt](int steps) { return pendulum_inputs(x0, v0, dt, steps); };
  const GaussianSampler init(m.initial.cov);
  m.draw_truth0 = [init](const SphereLiftedState& nominal, CounterRng& rng) {
    return phi_sphere(nominal, init.sample(rng), Side::Right);
  };

  m.state_columns = {"x", "y", "z"};
  m.state_values = [](const SphereLiftedState& s) {
    const Eigen::Vector3d x = s.point();
    return std::vector<double>{x(0), x(1), x(2)};
  };
  m.error_blocks = {"sphere"};
  m.block_errors = [](const SphereLiftedState& truth, const SphereLiftedState& est) {
    const Eigen::Vector3d a = truth.point();
    const Eigen::Vector3d b = est.point();
    return Eigen::VectorXd::Constant(1, std::atan2(a.cross(b).norm(), a.dot(b)));
  };
  return m;
}

}  // namespace ukfm
