#pragma once

#include <memory>
#include <optional>

#include "ctph/control/pid.hpp"
#include "ctph/hdob/observer.hpp"
#include "ctph/sim/mixer.hpp"
#include "ctph/sim/types.hpp"

namespace ctph {

/// Inner-loop configuration: PID gains plus the command-shaping limits.
struct CascadeConfig {
  PidGains height_gains = PidGains::height_defaults();
  PidGains attitude_gains = PidGains::attitude_defaults();
  double tilt_limit = kDefaultTiltLimit;  ///< clip on commanded roll/pitch [rad]
  /// Saturation on the commanded angular acceleration per body axis. The
  /// attitude gains act in moment space on tiny inertias, so the raw command
  /// is enormous; this limit turns the loop into a rate-bounded (near
  /// time-optimal) servo while keeping the PID law intact.
  double max_angular_accel = 10.0;  ///< [rad/s^2]
  bool use_observer = false;
  HybridObserver::Mode observer_mode = HybridObserver::Mode::hybrid;
  HdobConfig observer;
};

/// References consumed by the inner loop each step.
struct CascadeSetpoint {
  double z_d = 0.0;    ///< desired altitude [m]
  double psi_d = 0.0;  ///< desired yaw [rad]
  double f_x = 0.0;    ///< desired Earth-frame horizontal force [N]
  double f_y = 0.0;    ///< desired Earth-frame horizontal force [N]
};

/// Altitude/attitude PID cascade with optional disturbance-observer
/// compensation and motor allocation. One instance drives one vehicle.
class CascadeController {
 public:
  struct Output {
    Wrench wrench;        ///< physically applied wrench (post-allocation)
    MotorSpeeds speeds;   ///< allocated rotor speeds
    bool saturated = false;  ///< any clip in allocation or tilt guard
    double a_z = 0.0;        ///< height-PID vertical acceleration command
    AttitudeCommand attitude_cmd;   ///< commanded roll/pitch
    Eigen::Vector3d attitude_err = Eigen::Vector3d::Zero();
    Eigen::Vector4d d_est = Eigen::Vector4d::Zero();  ///< observer estimates
  };

  CascadeController(const QuadrotorParams& params, const CascadeConfig& config);

  /// Computes the wrench for the current state and setpoint.
  Output control(const QuadrotorState& state, const CascadeSetpoint& setpoint,
                 double dt);

  /// Feeds the observer with the transition produced by the last applied
  /// wrench; call once per simulation step (no-op when the observer is off).
  void observe(const QuadrotorState& prev, const QuadrotorState& now,
               const Wrench& applied, double dt);

  void reset();

  const QuadrotorParams& params() const { return params_; }
  const CascadeConfig& config() const { return config_; }

 private:
  QuadrotorParams params_;
  CascadeConfig config_;
  PidState height_state_;
  std::array<PidState, 3> attitude_state_;
  Eigen::Vector3d prev_attitude_err_ = Eigen::Vector3d::Zero();
  bool attitude_primed_ = false;
  std::optional<HybridObserver> observer_;
};

}  // namespace ctph
