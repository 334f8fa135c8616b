#include "ukfm/models/slam2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ukfm/models/models.hpp"

namespace ukfm {

namespace {

constexpr double kAugmentStep = 1e-5;

}  // namespace

LandmarkSet default_slam_landmarks() {
  // Two rings around the centre of the default circular path.
  LandmarkSet out;
  const Eigen::Vector2d centre(0.0, 5.0);
  for (int i = 0; i < 5; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 5.0;
    out.push_back(centre + 3.0 * Eigen::Vector2d(std::cos(a), std::sin(a)));
    out.push_back(centre + 7.0 * Eigen::Vector2d(std::cos(a + 0.6), std::sin(a + 0.6)));
  }
  return out;
}

const Retraction<MixedState>& SlamModel::retraction(const std::string& id) const {
  for (const auto& r : retractions) {
    if (r.name == id) return r;
  }
  throw Error(ErrorCode::InvalidConfig, "model slam2d has no retraction '" + id + "'");
}

SlamModel slam2d(const ModelParams& params) {
  const auto p = resolve_params({{"speed", 1.0},
                                 {"yaw_rate", 0.2},
                                 {"odo_speed_std", 0.05},
                                 {"odo_lateral_std", 0.05},
                                 {"odo_yaw_rate_std", 0.0175},
                                 {"obs_std", 0.1},
                                 {"range", 4.0},
                                 {"obs_period", 10}},
                                params, "slam2d");
  SlamModel m;
  SlamConfig& c = m.config;
  c.dt = params.dt.value_or(0.05);
  c.speed = p.at("speed");
  c.yaw_rate = p.at("yaw_rate");
  const Eigen::Vector3d odo_std(p.at("odo_yaw_rate_std") * c.dt, p.at("odo_speed_std") * c.dt,
                                p.at("odo_lateral_std") * c.dt);
  c.Q = odo_std.cwiseAbs2().asDiagonal();
  c.obs_std = p.at("obs_std");
  c.range = p.at("range");
  c.obs_period = static_cast<int>(p.at("obs_period"));
  c.landmarks = params.landmarks.value_or(default_slam_landmarks());
  for (const auto& l : c.landmarks) {
    if (l.size() != 2) throw Error(ErrorCode::InvalidConfig, "slam2d landmarks must be 2D");
  }

  m.filter.f = slam_step;
  m.filter.Q = c.Q;
  m.filter.R = std::pow(c.obs_std, 2) * Eigen::MatrixXd::Identity(2, 2);
  m.filter.dt = c.dt;
  m.filter.normalize = [](MixedState& x) { normalize_rotation(x.group); };

  m.retractions = {mixed_retraction(Side::Left), mixed_retraction(Side::Right)};
  m.retractions[0].name = "left";
  m.retractions[1].name = "right";
  return m;
}

MixedState slam_step(const MixedState& x, const Eigen::VectorXd& odometry, const Eigen::VectorXd& w, double) {
  return MixedState{odometry_step(x.group, odometry.head<3>() + w.head<3>()), x.euclid};
}

Eigen::Vector2d observe_relative(const SEk& pose, const Eigen::Vector2d& landmark) {
  return pose.rot().transpose() * (landmark - pose.trans().col(0));
}

Eigen::VectorXd slam_observe(const MixedState& x, std::span<const int> slots) {
  Eigen::VectorXd y(2 * slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    y.segment<2>(2 * i) = observe_relative(x.group, x.euclid.segment<2>(2 * slots[i]));
  }
  return y;
}

int slam_slot(const SlamBelief& b, int id) {
  const auto it = std::find(b.ids.begin(), b.ids.end(), id);
  if (it == b.ids.end()) throw Error(ErrorCode::UnknownLandmarkId, "landmark " + std::to_string(id) + " is not mapped");
  return static_cast<int>(it - b.ids.begin());
}

SlamBelief augment_landmark(const SlamBelief& b, int id, const Eigen::Vector2d& y, const Eigen::Matrix2d& R,
                            const Retraction<MixedState>& retraction) {
  if (std::find(b.ids.begin(), b.ids.end(), id) != b.ids.end()) {
    throw Error(ErrorCode::InvalidConfig, "landmark " + std::to_string(id) + " is already mapped");
  }
  const MixedState& mean = b.belief.mean;
  const Eigen::Index d = b.belief.cov.rows();
  const auto inverse_observation = [&y](const MixedState& x) -> Eigen::Vector2d {
    return x.group.trans().col(0) + x.group.rot() * y;
  };

  // The new landmark depends on the pose only, so the Jacobian is zero on the
  // landmark coordinates and only the three pose columns are differenced.
  Eigen::Matrix<double, 2, 3> G;
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(j) = kAugmentStep;
    G.col(j) = (inverse_observation(retraction.phi(mean, e)) - inverse_observation(retraction.phi(mean, -e))) /
               (2.0 * kAugmentStep);
  }

  const Eigen::MatrixXd& P = b.belief.cov;
  const Eigen::MatrixXd GP = G * P.topRows(3);
  const Eigen::Matrix2d C = mean.group.rot();

  SlamBelief out;
  out.ids = b.ids;
  out.ids.push_back(id);
  out.belief.mean.group = mean.group;
  out.belief.mean.euclid.resize(mean.euclid.size() + 2);
  out.belief.mean.euclid << mean.euclid, inverse_observation(mean);
  out.belief.cov.resize(d + 2, d + 2);
  out.belief.cov.topLeftCorner(d, d) = P;
  out.belief.cov.bottomLeftCorner(2, d) = GP;
  out.belief.cov.topRightCorner(d, 2) = GP.transpose();
  const Eigen::Matrix2d Pll = GP.leftCols(3) * G.transpose() + C * R * C.transpose();
  out.belief.cov.bottomRightCorner(2, 2) = 0.5 * (Pll + Pll.transpose());
  return out;
}

SlamData simulate_slam(const SlamModel& model, int steps, std::uint64_t seed, std::uint64_t run) {
  const SlamConfig& c = model.config;
  CounterRng process(seed, 4 * run);
  CounterRng sensor(seed, 4 * run + 1);
  const GaussianSampler w(c.Q);
  const GaussianSampler v(std::pow(c.obs_std, 2) * Eigen::Matrix2d::Identity());

  SlamData data;
  data.truth.reserve(steps + 1);
  data.truth.push_back(SEk::identity(2, 1));
  const Eigen::Vector3d odo(c.yaw_rate * c.dt, c.speed * c.dt, 0.0);
  data.odometry.assign(steps, odo);
  data.observations.resize(steps);
  for (int i = 0; i < steps; ++i) {
    const Eigen::Vector3d noise = w.sample(process);
    data.truth.push_back(odometry_step(data.truth.back(), odo + noise));
    if (c.obs_period <= 0 || (i + 1) % c.obs_period != 0) continue;
    const SEk& pose = data.truth.back();
    for (std::size_t id = 0; id < c.landmarks.size(); ++id) {
      const Eigen::Vector2d l = c.landmarks[id];
      if ((l - pose.trans().col(0)).norm() > c.range) continue;
      data.observations[i].push_back({static_cast<int>(id), observe_relative(pose, l) + v.sample(sensor)});
    }
  }
  return data;
}

std::vector<SlamBelief> run_slam(const SlamModel& model, const SlamData& data, const Retraction<MixedState>& retraction,
                                 double alpha) {
  const Eigen::Matrix2d R = std::pow(model.config.obs_std, 2) * Eigen::Matrix2d::Identity();
  SlamBelief b;
  b.belief.mean = MixedState{SEk::identity(2, 1), Eigen::VectorXd(0)};
  b.belief.cov = Eigen::MatrixXd::Zero(3, 3);

  std::vector<SlamBelief> out;
  out.reserve(data.odometry.size());
  for (std::size_t i = 0; i < data.odometry.size(); ++i) {
    try {
      b.belief = propagate(b.belief, data.odometry[i], model.filter.f, model.filter.Q, model.config.dt, retraction, alpha);

      std::vector<int> slots;
      std::vector<Eigen::Vector2d> mapped_y;
      std::vector<const SlamObservation*> fresh;
      for (const auto& obs : data.observations[i]) {
        const auto it = std::find(b.ids.begin(), b.ids.end(), obs.id);
        if (it == b.ids.end()) {
          fresh.push_back(&obs);
        } else {
          slots.push_back(static_cast<int>(it - b.ids.begin()));
          mapped_y.push_back(obs.y);
        }
      }
      if (!slots.empty()) {
        Eigen::VectorXd y(2 * slots.size());
        for (std::size_t k = 0; k < slots.size(); ++k) y.segment<2>(2 * k) = mapped_y[k];
        const Eigen::MatrixXd Rs =
            std::pow(model.config.obs_std, 2) * Eigen::MatrixXd::Identity(y.size(), y.size());
        const ObservationFn<MixedState> h = [&slots](const MixedState& x) { return slam_observe(x, slots); };
        b.belief = update(b.belief, y, h, Rs, retraction, alpha);
      }
      for (const SlamObservation* obs : fresh) b = augment_landmark(b, obs->id, obs->y, R, retraction);

      if (model.filter.normalize_period > 0 && (i + 1) % model.filter.normalize_period == 0) {
        model.filter.normalize(b.belief.mean);
      }
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      throw StepError(e, i + 1);
    }
    out.push_back(b);
  }
  return out;
}

MixedState slam_truth_state(const SlamModel& model, const SEk& pose, const SlamBelief& b) {
  MixedState x{pose, Eigen::VectorXd(2 * b.ids.size())};
  for (std::size_t i = 0; i < b.ids.size(); ++i) {
    const int id = b.ids[i];
    if (id < 0 || id >= static_cast<int>(model.config.landmarks.size())) {
      throw Error(ErrorCode::UnknownLandmarkId, "landmark " + std::to_string(id) + " is not in the landmark set");
    }
    x.euclid.segment<2>(2 * i) = model.config.landmarks[id];
  }
  return x;
}

}  // namespace ukfm
