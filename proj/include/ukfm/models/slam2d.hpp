#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "ukfm/models/model_spec.hpp"
#include "ukfm/retraction.hpp"
#include "ukfm/sigma_core.hpp"

namespace ukfm {

/// 2D SLAM: an SE(2) pose plus the positions of the landmarks mapped so far,
/// held as a MixedState whose Euclidean part stacks (x, y) per landmark.
struct SlamConfig {
  double dt = 0.05;
  double speed = 1.0;
  double yaw_rate = 0.2;
  Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();  ///< odometry increment noise
  double obs_std = 0.1;
  double range = 4.0;
  int obs_period = 10;
  LandmarkSet landmarks;
};

struct SlamModel {
  SlamConfig config;
  FilterModel<MixedState> filter;  // f and Q; observations are built per step
  std::vector<Retraction<MixedState>> retractions;

  const Retraction<MixedState>& retraction(const std::string& id) const;
};

SlamModel slam2d(const ModelParams& params = {});
LandmarkSet default_slam_landmarks();

/// Belief with the landmark id owning each (x, y) slot of the Euclidean part.
struct SlamBelief {
  Belief<MixedState> belief;
  std::vector<int> ids;
};

struct SlamObservation {
  int id = 0;
  Eigen::Vector2d y = Eigen::Vector2d::Zero();
};

/// Pose odometry; landmarks are static.
MixedState slam_step(const MixedState& x, const Eigen::VectorXd& odometry, const Eigen::VectorXd& w, double dt);

/// y = C(theta)^T (l - p).
Eigen::Vector2d observe_relative(const SEk& pose, const Eigen::Vector2d& landmark);

/// Stacked relative observations of the landmarks in `slots`.
Eigen::VectorXd slam_observe(const MixedState& x, std::span<const int> slots);

/// Slot of `id` in the belief; throws UnknownLandmarkId.
int slam_slot(const SlamBelief& b, int id);

/// Adds landmark `id` observed at `y`: the mean comes from the inverse
/// observation p + C y, the covariance is extended with the linearized
/// blocks G P and G P G^T + C R C^T, G the Jacobian of the inverse observation
/// with respect to the retraction coordinates. Existing blocks are untouched.
SlamBelief augment_landmark(const SlamBelief& b, int id, const Eigen::Vector2d& y, const Eigen::Matrix2d& R,
                            const Retraction<MixedState>& retraction);

struct SlamData {
  std::vector<SEk> truth;                               ///< steps + 1 poses
  std::vector<Eigen::VectorXd> odometry;                ///< steps commanded increments
  std::vector<std::vector<SlamObservation>> observations;  ///< per step, ascending id
};

SlamData simulate_slam(const SlamModel& model, int steps, std::uint64_t seed, std::uint64_t run);

/// Full SLAM recursion (propagate, update mapped landmarks, augment new ones).
/// Failures are rethrown as StepError.
std::vector<SlamBelief> run_slam(const SlamModel& model, const SlamData& data, const Retraction<MixedState>& retraction,
                                 double alpha);

/// Truth expressed with the same landmark slots as `b`.
MixedState slam_truth_state(const SlamModel& model, const SEk& pose, const SlamBelief& b);

}  // namespace ukfm
