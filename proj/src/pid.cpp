#include "ctph/control/pid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ctph/sim/so3.hpp"

namespace ctph {

namespace {

double pid_term(double error, double rate, const PidGains& g,
                PidState& state, double dt) {
  state.integral = std::clamp(state.integral + error * dt,
                              -g.integral_limit, g.integral_limit);
  return g.kp * error + g.ki * state.integral + g.kd * rate;
}

}  // namespace

double altitude_control(double z_d, double z, double z_dot,
                        const PidGains& gains, PidState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("altitude_control: dt <= 0");
  return pid_term(z_d - z, -z_dot, gains, state, dt);
}

AttitudeCommand horizontal_to_attitude(double f_x, double f_y, double f_z,
                                       double psi_d, double tilt_limit) {
  if (!(f_z > 0.0)) {
    throw std::domain_error("horizontal_to_attitude: f_z must be positive");
  }
  const double sp = std::sin(psi_d), cp = std::cos(psi_d);
  AttitudeCommand cmd;
  cmd.pitch = std::atan((cp * f_x + sp * f_y) / f_z);
  cmd.roll = std::atan(std::cos(cmd.pitch) * (sp * f_x - cp * f_y) / f_z);
  cmd.pitch = std::clamp(cmd.pitch, -tilt_limit, tilt_limit);
  cmd.roll = std::clamp(cmd.roll, -tilt_limit, tilt_limit);
  return cmd;
}

ThrustResult thrust_compensation(double a_z, double phi, double theta,
                                 double mass, double gravity) {
  ThrustResult out;
  double c = std::cos(phi) * std::cos(theta);
  if (c <= 0.1) {
    c = 0.1;
    out.saturated = true;
  }
  out.thrust = mass * (gravity + a_z) / c;
  return out;
}

Eigen::Vector3d attitude_error(const Eigen::Matrix3d& r,
                               const Eigen::Matrix3d& r_d) {
  const Eigen::Matrix3d rt = r.transpose() * r_d;
  return 0.5 * vex(rt.transpose() - rt);
}

Eigen::Vector3d attitude_control(const Eigen::Vector3d& e_r,
                                 const Eigen::Vector3d& e_r_rate,
                                 const PidGains& gains,
                                 std::array<PidState, 3>& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("attitude_control: dt <= 0");
  Eigen::Vector3d m_d;
  for (int i = 0; i < 3; ++i) {
    m_d(i) = pid_term(e_r(i), e_r_rate(i), gains, state[i], dt);
  }
  return m_d;
}

}  // namespace ctph
