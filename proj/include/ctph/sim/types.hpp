#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace ctph {

/// Thrown when the simulated state leaves the configured sanity envelope.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Physical parameters of the simulated quadrotor.
///
/// Defaults describe the 27 g airframe used throughout: a small X-configuration
/// quadrotor with rotor thrust f_i = C_f * Omega_i^2 and drag torque
/// M_i = C_M * Omega_i^2.
struct QuadrotorParams {
  double mass = 0.027;             ///< m [kg]
  double gravity = 9.81;           ///< g [m/s^2], acts along -z (Earth frame)
  double arm_length = 0.0397;      ///< l [m], rotor hub to center
  double inertia_x = 1.40e-5;      ///< I_x [kg m^2]
  double inertia_y = 1.40e-5;      ///< I_y [kg m^2]
  double inertia_z = 2.17e-5;      ///< I_z [kg m^2]
  double thrust_coeff = 2.88e-8;   ///< C_f [kg m / rad^2]
  double torque_coeff = 7.24e-10;  ///< C_M [kg m^2 / rad^2]
  double max_motor_speed = 2670.0; ///< Omega_max [rad/s], rotor speed limit
  double divergence_bound = 1e4;   ///< state sanity bound for step()

  Eigen::Vector3d inertia_diagonal() const {
    return {inertia_x, inertia_y, inertia_z};
  }

  /// Validates positivity of every physical field; throws
  /// std::invalid_argument naming the offending field.
  void validate() const;
};

/// Full rigid-body state. The rotation matrix is the source of truth for
/// attitude; Euler angles are derived on demand (see euler()).
struct QuadrotorState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  ///< eta [m], Earth frame
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  ///< v [m/s], Earth frame
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  ///< R, body->Earth
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();  ///< omega [rad/s], body frame

  /// Euler angles zeta = (phi, theta, psi) in the Z-Y-X convention consistent
  /// with rotation_from_euler(). Derived from the rotation matrix so it can
  /// never fall out of sync.
  Eigen::Vector3d euler() const;
};

/// Collective thrust along the body z-axis plus body-frame torques: the
/// 4-channel control input produced by motor mixing.
struct Wrench {
  double thrust = 0.0;  ///< f [N], >= 0 when produced by the motor mixer
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  ///< (M_x, M_y, M_z) [N m]
};

/// Squared-speed-linear rotor speeds, order matching the allocation matrix.
struct MotorSpeeds {
  Eigen::Vector4d omega = Eigen::Vector4d::Zero();  ///< Omega_1..4 [rad/s]
};

/// External disturbance: wind-type forces in the Earth frame, parasitic
/// torques in the body frame.
struct DisturbanceWrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   ///< d_f [N], Earth frame
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  ///< d_M [N m], body frame
};

}  // namespace ctph
