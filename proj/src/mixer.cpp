#include "ctph/sim/mixer.hpp"

#include <cmath>

namespace ctph {

Wrench mix_forces(const MotorSpeeds& speeds, const QuadrotorParams& params) {
  const Eigen::Vector4d w2 = speeds.omega.array().square();
  const double cf = params.thrust_coeff;
  const double cm = params.torque_coeff;
  const double a = params.arm_length / std::sqrt(2.0) * cf;

  Wrench out;
  out.thrust = cf * w2.sum();
  out.torque.x() = a * (-w2(0) - w2(1) + w2(2) + w2(3));
  out.torque.y() = a * (-w2(0) + w2(1) + w2(2) - w2(3));
  out.torque.z() = cm * (-w2(0) + w2(1) - w2(2) + w2(3));
  return out;
}

AllocationResult allocate_motor_speeds(const Wrench& wrench,
                                       const QuadrotorParams& params) {
  const double cf = params.thrust_coeff;
  const double cm = params.torque_coeff;
  const double a = params.arm_length / std::sqrt(2.0) * cf;

  // Invert the 4x4 allocation matrix channel by channel; each squared speed
  // is a +/- combination of the four normalized inputs.
  const double u1 = wrench.thrust / (4.0 * cf);
  const double u2 = wrench.torque.x() / (4.0 * a);
  const double u3 = wrench.torque.y() / (4.0 * a);
  const double u4 = wrench.torque.z() / (4.0 * cm);

  Eigen::Vector4d w2;
  w2 << u1 - u2 - u3 - u4,
        u1 - u2 + u3 + u4,
        u1 + u2 + u3 - u4,
        u1 + u2 - u3 + u4;

  AllocationResult out;
  for (int i = 0; i < 4; ++i) {
    double s = w2(i);
    if (s < 0.0) {
      // Tolerate tiny negatives from floating-point cancellation silently;
      // anything material means the wrench left the actuator envelope.
      if (s < -1e-9) out.saturated = true;
      s = 0.0;
    }
    double omega = std::sqrt(s);
    if (omega > params.max_motor_speed) {
      omega = params.max_motor_speed;
      out.saturated = true;
    }
    out.speeds.omega(i) = omega;
  }
  return out;
}

}  // namespace ctph
