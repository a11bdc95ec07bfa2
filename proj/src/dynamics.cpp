#include "ctph/sim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "ctph/sim/so3.hpp"

namespace ctph {

void QuadrotorParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("QuadrotorParams: ") + name +
                                  " must be strictly positive");
    }
  };
  check(mass, "mass");
  check(gravity, "gravity");
  check(arm_length, "arm_length");
  check(inertia_x, "inertia_x");
  check(inertia_y, "inertia_y");
  check(inertia_z, "inertia_z");
  check(thrust_coeff, "thrust_coeff");
  check(torque_coeff, "torque_coeff");
  check(max_motor_speed, "max_motor_speed");
  check(divergence_bound, "divergence_bound");
}

Eigen::Vector3d QuadrotorState::euler() const {
  return euler_from_rotation(rotation);
}

namespace {

// Flat derivative record for the RK4 stages.
struct Derivative {
  Eigen::Vector3d dp, dv, dw;
  Eigen::Matrix3d dr;
};

Derivative dynamics(const QuadrotorState& s, const Wrench& u,
                    const DisturbanceWrench& d, const QuadrotorParams& p) {
  const Eigen::Vector3d inertia = p.inertia_diagonal();
  const Eigen::Vector3d body_force(0.0, 0.0, u.thrust);
  const Eigen::Vector3d gravity(0.0, 0.0, -p.gravity);

  Derivative out;
  out.dp = s.velocity;
  out.dv = (s.rotation * body_force + d.force) / p.mass + gravity;
  out.dr = s.rotation * hat(s.angular_velocity);
  const Eigen::Vector3d iw = inertia.cwiseProduct(s.angular_velocity);
  out.dw = (-s.angular_velocity.cross(iw) + u.torque + d.torque)
               .cwiseQuotient(inertia);
  return out;
}

QuadrotorState advance(const QuadrotorState& s, const Derivative& k,
                       double h) {
  QuadrotorState out;
  out.position = s.position + h * k.dp;
  out.velocity = s.velocity + h * k.dv;
  out.rotation = s.rotation + h * k.dr;
  out.angular_velocity = s.angular_velocity + h * k.dw;
  return out;
}

}  // namespace

QuadrotorState step(const QuadrotorState& state, const Wrench& wrench,
                    const DisturbanceWrench& disturbance, double dt,
                    const QuadrotorParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");

  const Derivative k1 = dynamics(state, wrench, disturbance, params);
  const Derivative k2 =
      dynamics(advance(state, k1, dt / 2), wrench, disturbance, params);
  const Derivative k3 =
      dynamics(advance(state, k2, dt / 2), wrench, disturbance, params);
  const Derivative k4 =
      dynamics(advance(state, k3, dt), wrench, disturbance, params);

  QuadrotorState out;
  const double h = dt / 6.0;
  out.position =
      state.position + h * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
  out.velocity =
      state.velocity + h * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
  out.rotation = orthonormalize(
      state.rotation + h * (k1.dr + 2 * k2.dr + 2 * k3.dr + k4.dr));
  out.angular_velocity = state.angular_velocity +
                         h * (k1.dw + 2 * k2.dw + 2 * k3.dw + k4.dw);

  const double bound = params.divergence_bound;
  const double mag =
      std::max({out.position.cwiseAbs().maxCoeff(),
                out.velocity.cwiseAbs().maxCoeff(),
                out.angular_velocity.cwiseAbs().maxCoeff()});
  if (!std::isfinite(mag) || mag > bound) {
    throw DivergenceError("step: state magnitude exceeded sanity bound");
  }
  return out;
}

QuadrotorParams randomize_inertia(const QuadrotorParams& params,
                                  double fraction, std::mt19937_64& rng) {
  if (fraction < 0.0 || fraction >= 1.0) {
    throw std::invalid_argument("randomize_inertia: fraction must be in [0,1)");
  }
  std::uniform_real_distribution<double> factor(1.0 - fraction,
                                                1.0 + fraction);
  QuadrotorParams out = params;
  out.mass = params.mass * factor(rng);
  out.inertia_x = params.inertia_x * factor(rng);
  out.inertia_y = params.inertia_y * factor(rng);
  out.inertia_z = params.inertia_z * factor(rng);
  return out;
}

}  // namespace ctph
