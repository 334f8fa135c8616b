#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ukfm/lie_groups.hpp"
#include "ukfm/models/model_spec.hpp"
#include "ukfm/retraction.hpp"

namespace ukfm {

inline const Eigen::Vector3d kGravity(0.0, 0.0, -9.81);

// ---------------------------------------------------------------------------
// Kinematics shared by several models.

/// SE(2) odometry: pose * exp((dtheta, dx, dy)^).
SEk odometry_step(const SEk& pose, const Eigen::Vector3d& increment);

/// Flat-Earth inertial kinematics on (C, v, p) stored as SE_2(3):
/// C' = C exp(gyro dt), v' = v + (C acc + g) dt, p' = p + v dt.
SEk inertial_step(const SEk& state, const Eigen::Vector3d& gyro, const Eigen::Vector3d& acc, double dt);

/// Roll, pitch, yaw of a rotation (Z-Y-X convention).
Eigen::Vector3d rpy_from_rotation(const Eigen::Matrix3d& C);
Eigen::Matrix3d rot_z(double yaw);

/// Angle of Ra^T Rb in [0, pi], defined everywhere (no near-pi error).
double rotation_angle(const Eigen::MatrixXd& Ra, const Eigen::MatrixXd& Rb);

/// Re-projects the rotation block onto SO(d).
void normalize_rotation(SEk& X);

// ---------------------------------------------------------------------------
// Models. Each accepts named overrides; see the defaults in the sources and
// README for the recognized keys.

/// Constant-velocity model on R^2 (position, velocity) with position fixes.
/// Linear-Gaussian, used as the exact-Kalman reference.
ModelSpec<Eigen::VectorXd> linear_model(const ModelParams& params = {});

/// SE(2) robot with odometry increments and GNSS position fixes.
ModelSpec<SEk> localization2d(const ModelParams& params = {});

/// SO(3) attitude from gyro propagation and accelerometer + magnetometer.
ModelSpec<SEk> attitude3d(const ModelParams& params = {});
Eigen::Vector3d attitude_mag_field();

/// Flat-Earth inertial navigation with body-frame landmark observations.
/// Retractions: so3xr6 (componentwise), se23_left, se23_right.
ModelSpec<SEk> inertial_nav(const ModelParams& params = {});
LandmarkSet default_nav_landmarks();
/// Stacked y_i = C^T (l_i - p).
Eigen::VectorXd observe_landmarks(const SEk& state, const LandmarkSet& landmarks);

/// SE_2(3) x R^6 (gyro bias, accel bias) with GNSS position fixes.
ModelSpec<MixedState> imu_gnss(const ModelParams& params = {});
MixedState imu_gnss_step(const MixedState& state, const Eigen::VectorXd& imu, const Eigen::VectorXd& w, double dt);

/// Stiff-wire pendulum on the 2-sphere, lifted to SO(3), observing the first
/// two coordinates of the point.
ModelSpec<SphereLiftedState> pendulum_s2(const ModelParams& params = {});
/// Angular velocities x x v of a discretized spherical pendulum.
std::vector<Eigen::VectorXd> pendulum_inputs(const Eigen::Vector3d& x0, const Eigen::Vector3d& v0, double dt,
                                             int steps);

}  // namespace ukfm
