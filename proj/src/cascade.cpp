#include "ctph/control/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "ctph/sim/so3.hpp"

namespace ctph {

CascadeController::CascadeController(const QuadrotorParams& params,
                                     const CascadeConfig& config)
    : params_(params), config_(config) {
  params_.validate();
  if (config_.use_observer) {
    observer_.emplace(config_.observer, params_, config_.observer_mode);
  }
}

CascadeController::Output CascadeController::control(
    const QuadrotorState& state, const CascadeSetpoint& setpoint, double dt) {
  Output out;
  if (observer_) out.d_est = observer_->estimate();

  // Height loop, then observer compensation of the vertical force command.
  const Eigen::Vector3d euler = state.euler();
  out.a_z = altitude_control(setpoint.z_d, state.position.z(),
                             state.velocity.z(), config_.height_gains,
                             height_state_, dt);
  const Eigen::Vector3d m_zero = Eigen::Vector3d::Zero();
  const double f_z_cmd =
      params_.mass * (params_.gravity + out.a_z) - out.d_est(kChanFz);

  // Horizontal force to desired attitude; an exhausted vertical command
  // (free-fall request) degenerates to a level attitude and zero thrust.
  double thrust_cmd = 0.0;
  if (f_z_cmd > 0.0) {
    out.attitude_cmd =
        horizontal_to_attitude(setpoint.f_x, setpoint.f_y, f_z_cmd,
                               setpoint.psi_d, config_.tilt_limit);
    double c = std::cos(euler.x()) * std::cos(euler.y());
    if (c <= 0.1) {
      c = 0.1;
      out.saturated = true;
    }
    thrust_cmd = f_z_cmd / c;
  } else {
    out.attitude_cmd = AttitudeCommand{};
    out.saturated = true;
  }

  // Attitude loop on the rotation-matrix error. attitude_error(R, R_d) is the
  // geometric error of the paper's convention; the regulating loop needs its
  // negation, which the antisymmetry of the construction provides by swapping
  // the arguments.
  const Eigen::Matrix3d r_d = rotation_from_euler_quaternion(
      {out.attitude_cmd.roll, out.attitude_cmd.pitch, setpoint.psi_d});
  out.attitude_err = attitude_error(r_d, state.rotation);
  const Eigen::Vector3d err_rate =
      attitude_primed_ ? ((out.attitude_err - prev_attitude_err_) / dt).eval()
                       : m_zero;
  prev_attitude_err_ = out.attitude_err;
  attitude_primed_ = true;

  const Eigen::Vector3d m_d = attitude_control(
      out.attitude_err, err_rate, config_.attitude_gains, attitude_state_, dt);

  // Angular-acceleration command: the PID feedback is saturated at
  // max_angular_accel (the stiff moment-space gains would otherwise demand
  // ~1e4 rad/s^2), while the observer compensation is added outside the clip
  // so that feedforward rejection keeps its full authority over disturbance
  // torques larger than the feedback budget.
  const Eigen::Vector3d inertia = params_.inertia_diagonal();
  Eigen::Vector3d w_dot = m_d.cwiseQuotient(inertia);
  const double wd_max = config_.max_angular_accel;
  for (int i = 0; i < 3; ++i) w_dot(i) = std::clamp(w_dot(i), -wd_max, wd_max);
  w_dot -= Eigen::Vector3d(out.d_est.tail<3>()).cwiseQuotient(inertia);

  Wrench request;
  request.thrust = std::max(thrust_cmd, 0.0);
  request.torque = inertia.cwiseProduct(w_dot);

  const AllocationResult alloc = allocate_motor_speeds(request, params_);
  out.speeds = alloc.speeds;
  out.saturated = out.saturated || alloc.saturated;
  out.wrench = mix_forces(alloc.speeds, params_);
  return out;
}

void CascadeController::observe(const QuadrotorState& prev,
                                const QuadrotorState& now,
                                const Wrench& applied, double dt) {
  if (observer_) observer_->update(prev, now, applied, dt);
}

void CascadeController::reset() {
  height_state_ = PidState{};
  attitude_state_ = {};
  prev_attitude_err_.setZero();
  attitude_primed_ = false;
  if (observer_) observer_->reset();
}

}  // namespace ctph
