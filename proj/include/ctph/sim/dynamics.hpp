#pragma once

#include <random>

#include "ctph/sim/types.hpp"

namespace ctph {

/// Advances the rigid-body dynamics by one fixed time step using RK4:
///
///   eta_dot = v
///   m v_dot = R F + m g + d_f          (F = (0,0,f) body, g = (0,0,-g) Earth)
///   R_dot   = R hat(omega)
///   I w_dot = -omega x (I omega) + M + d_M
///
/// The rotation matrix is integrated as a full matrix and re-orthonormalized
/// after the step. Throws DivergenceError when any state magnitude exceeds
/// params.divergence_bound or turns non-finite.
QuadrotorState step(const QuadrotorState& state, const Wrench& wrench,
                    const DisturbanceWrench& disturbance, double dt,
                    const QuadrotorParams& params);

/// Returns a copy of params with the mass and each inertia entry
/// independently rescaled by a uniform factor in [1-fraction, 1+fraction].
QuadrotorParams randomize_inertia(const QuadrotorParams& params,
                                  double fraction, std::mt19937_64& rng);

}  // namespace ctph
