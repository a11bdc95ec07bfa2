#pragma once

#include <Eigen/Dense>

#include <array>
#include <numbers>

namespace ctph {

/// Per-channel PID gains with an anti-windup clamp on the integral term.
struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = 1.0;

  /// Height loop defaults: K_p = 3.0, K_i = 0.0, K_d = 2.0.
  static PidGains height_defaults() { return {3.0, 0.0, 2.0, 1.0}; }
  /// Attitude loop defaults (shared by roll/pitch/yaw): 10.4 / 0.0 / 1.2.
  static PidGains attitude_defaults() { return {10.4, 0.0, 1.2, 1.0}; }
};

/// Mutable per-channel controller memory.
struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;  ///< last attitude error, for its backward difference
  bool primed = false;      ///< prev_error holds a real sample
};

/// Commanded roll/pitch pair produced by the horizontal-force mapping.
struct AttitudeCommand {
  double roll = 0.0;   ///< phi_d [rad]
  double pitch = 0.0;  ///< theta_d [rad]
};

/// Collective-thrust command plus a flag marking the tilt-guard fallback.
struct ThrustResult {
  double thrust = 0.0;
  bool saturated = false;
};

inline constexpr double kDefaultTiltLimit = std::numbers::pi / 3;

/// Height PID: a_z = K_p e_z + K_i int(e_z) + K_d e_vz with e_z = z_d - z and
/// the derivative taken on the measurement, e_vz = -z_dot.
double altitude_control(double z_d, double z, double z_dot,
                        const PidGains& gains, PidState& state, double dt);

/// Back-calculates desired roll/pitch from desired horizontal forces:
///   theta_d = atan((cos(psi_d) f_x + sin(psi_d) f_y) / f_z)
///   phi_d   = atan(cos(theta_d) (sin(psi_d) f_x - cos(psi_d) f_y) / f_z)
/// Outputs are clipped to +/- tilt_limit. Throws std::domain_error when
/// f_z <= 0.
AttitudeCommand horizontal_to_attitude(double f_x, double f_y, double f_z,
                                       double psi_d,
                                       double tilt_limit = kDefaultTiltLimit);

/// Tilt-compensated collective thrust f = m (g + a_z) / (cos(phi) cos(theta)).
/// When cos(phi) cos(theta) <= 0.1 the divisor is pinned at 0.1 and the
/// saturated flag is set.
ThrustResult thrust_compensation(double a_z, double phi, double theta,
                                 double mass, double gravity);

/// Rotation-matrix attitude error e_R = 1/2 vex(Rt^T - Rt) with Rt = R^T R_d.
/// Antisymmetric in its arguments: swapping them negates the result.
Eigen::Vector3d attitude_error(const Eigen::Matrix3d& r,
                               const Eigen::Matrix3d& r_d);

/// Per-axis attitude PID over (e_R, int(e_R), e_R_rate), returning the
/// desired moment vector M_d.
Eigen::Vector3d attitude_control(const Eigen::Vector3d& e_r,
                                 const Eigen::Vector3d& e_r_rate,
                                 const PidGains& gains,
                                 std::array<PidState, 3>& state, double dt);

}  // namespace ctph
