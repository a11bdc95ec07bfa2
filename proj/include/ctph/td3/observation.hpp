#pragma once

#include <Eigen/Dense>

#include "ctph/sim/types.hpp"
#include "ctph/td3/config.hpp"

namespace ctph {

enum class Axis { x = 0, y = 1 };

using Observation = Eigen::Matrix<double, 7, 1>;

/// Per-axis agent observation: (e, e_prev, v, tilt, tilt rate, a_z, cross
/// torque). For x the tilt is the pitch angle with torque M_y; for y it is
/// the roll angle with torque M_x. Euler rates come from the kinematic map,
/// not the raw body rates.
Observation build_observation(Axis axis, const QuadrotorState& state,
                              double target, double prev_error, double a_z,
                              const Eigen::Vector3d& torque);

/// Dense-plus-sparse tracking reward on a single axis error (meters).
double reward(double error, const RewardConfig& cfg);

/// Observation as the networks consume it: each feature divided by a fixed
/// magnitude bound so values land near [-1, 1]. Raw features span five
/// orders of magnitude (meters vs. ~1e-4 N*m cross torque); without the
/// rescale the tanh stacks saturate on far starts and the torque input
/// carries no weight. The bounds are part of the checkpoint interface:
/// changing them invalidates saved actors.
Eigen::Matrix<float, 7, 1> net_input(const Observation& obs);

/// Same, honoring the standardization toggle: plain float cast when off.
Eigen::Matrix<float, 7, 1> net_input(const Observation& obs, bool normalize);

}  // namespace ctph
