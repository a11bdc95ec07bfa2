#include "ctph/td3/observation.hpp"

#include <cmath>

#include "ctph/sim/so3.hpp"

namespace ctph {

Observation build_observation(Axis axis, const QuadrotorState& state,
                              double target, double prev_error, double a_z,
                              const Eigen::Vector3d& torque) {
  const Eigen::Vector3d euler = state.euler();
  const Eigen::Vector3d euler_rate =
      euler_rate_matrix(euler) * state.angular_velocity;

  Observation obs;
  if (axis == Axis::x) {
    obs << target - state.position.x(), prev_error, state.velocity.x(),
        euler.y(), euler_rate.y(), a_z, torque.y();
  } else {
    obs << target - state.position.y(), prev_error, state.velocity.y(),
        euler.x(), euler_rate.x(), a_z, torque.x();
  }
  return obs;
}

Eigen::Matrix<float, 7, 1> net_input(const Observation& obs) {
  // Bounds: 5 m workspace half-width for errors and speed, pi/3 tilt limit,
  // 10 rad/s and 10 m/s^2 loop authority, inertia times peak angular
  // acceleration (1.4e-5 * 10) for the cross torque.
  static const Observation bounds =
      (Observation() << 5.0, 5.0, 5.0, 1.0471975511965976, 10.0, 10.0, 1.4e-4)
          .finished();
  return obs.cwiseQuotient(bounds).cast<float>();
}

Eigen::Matrix<float, 7, 1> net_input(const Observation& obs, bool normalize) {
  return normalize ? net_input(obs) : obs.cast<float>().eval();
}

double reward(double error, const RewardConfig& cfg) {
  double r = cfg.beta1 * std::exp(-error * error / 2.0) -
             cfg.beta2 * std::abs(error);
  if (std::abs(error) < cfg.bonus_radius) r += cfg.beta3;
  return r;
}

}  // namespace ctph
