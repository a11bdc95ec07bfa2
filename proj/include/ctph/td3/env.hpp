#pragma once

#include <random>

#include "ctph/control/cascade.hpp"
#include "ctph/sim/types.hpp"
#include "ctph/td3/config.hpp"
#include "ctph/td3/observation.hpp"

namespace ctph {

/// Hover/point-tracking environment: the two horizontal agents command
/// lateral accelerations, the PID cascade holds altitude, attitude and yaw,
/// and the rigid-body model integrates at a fixed 10 ms step. Also serves
/// the evaluation scenarios via per-step target moves and disturbances.
class HoverEnv {
 public:
  struct Step {
    Observation obs_x, obs_y;
    double reward_x = 0.0, reward_y = 0.0;
    bool diverged = false;
  };

  HoverEnv(const QuadrotorParams& params, const CascadeConfig& cascade,
           const Td3Config& cfg, double dt = 0.01);

  /// Resets to a resting pose at `start` tracking `target`.
  void reset(const Eigen::Vector3d& start, const Eigen::Vector3d& target,
             double psi_d = 0.0);

  /// Training reset: start uniform in [-5,5] per horizontal axis at the
  /// hover altitude, target at the origin.
  void reset_random(std::mt19937_64& rng);

  /// Applies the two normalized actions (each in [-1,1]) for one step.
  /// On divergence the observations repeat the last valid ones and the
  /// `diverged` flag is set; the episode must then be abandoned.
  Step step(float action_x, float action_y,
            const DisturbanceWrench& disturbance = {});

  /// Moves the reference (used by evaluation scenarios with moving targets).
  void set_target(const Eigen::Vector3d& target, double psi_d);

  /// Swaps the physical parameters mid-flight (generalization scenario);
  /// the controller keeps its nominal model.
  void set_true_params(const QuadrotorParams& params) { true_params_ = params; }

  Observation observe(Axis axis) const;
  const Td3Config& config() const { return cfg_; }
  const QuadrotorState& state() const { return state_; }
  const Eigen::Vector3d& target() const { return target_; }
  const Wrench& last_wrench() const { return last_wrench_; }
  CascadeController& cascade() { return cascade_; }
  double dt() const { return dt_; }

 private:
  QuadrotorParams true_params_;  // what the plant integrates
  Td3Config cfg_;
  CascadeController cascade_;   // holds the nominal model
  QuadrotorState state_;
  Eigen::Vector3d target_ = Eigen::Vector3d::Zero();
  double psi_d_ = 0.0;
  double dt_;
  double prev_e_x_ = 0.0, prev_e_y_ = 0.0;
  double a_z_ = 0.0;
  Wrench last_wrench_;
};

}  // namespace ctph
