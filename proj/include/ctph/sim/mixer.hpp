#pragma once

#include "ctph/sim/types.hpp"

namespace ctph {

/// Motor speeds plus a flag recording whether any channel had to be clipped
/// (negative squared speed clamped to zero, or Omega above the speed limit).
struct AllocationResult {
  MotorSpeeds speeds;
  bool saturated = false;
};

/// Forward force-moment allocation for the X configuration:
///
///   [ f  ]   [      C_f          C_f         C_f          C_f     ] [Omega_1^2]
///   [ M_x ] = [ -(l/s2)C_f   -(l/s2)C_f   (l/s2)C_f    (l/s2)C_f  ] [Omega_2^2]
///   [ M_y ]   [ -(l/s2)C_f    (l/s2)C_f   (l/s2)C_f   -(l/s2)C_f  ] [Omega_3^2]
///   [ M_z ]   [    -C_M          C_M         -C_M          C_M    ] [Omega_4^2]
///
/// with s2 = sqrt(2). Speeds must be non-negative.
Wrench mix_forces(const MotorSpeeds& speeds, const QuadrotorParams& params);

/// Analytic inverse of mix_forces(). Squared speeds are clamped at zero
/// before the square root and each speed is clipped to params.max_motor_speed;
/// either intervention sets the saturated flag. On the feasible set the
/// round trip mix_forces(allocate(w)) == w holds to ~1e-9.
AllocationResult allocate_motor_speeds(const Wrench& wrench,
                                       const QuadrotorParams& params);

}  // namespace ctph
