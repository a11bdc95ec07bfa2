#pragma once

#include <Eigen/Dense>

namespace ctph {

/// Skew-symmetric matrix of w, i.e. hat(w) * v = w x v.
Eigen::Matrix3d hat(const Eigen::Vector3d& w);

/// Inverse of hat(). Rejects matrices that are not skew-symmetric within
/// 1e-9 (infinity norm of A + A^T) by throwing std::invalid_argument.
Eigen::Vector3d vex(const Eigen::Matrix3d& a);

/// Body->Earth rotation matrix from Euler angles zeta = (phi, theta, psi),
/// i.e. R = R_z(psi) * R_y(theta) * R_x(phi).
/// Throws std::domain_error when |theta| >= pi/2 (gimbal guard).
Eigen::Matrix3d rotation_from_euler(const Eigen::Vector3d& zeta);

/// Same rotation assembled through a unit quaternion and normalized before
/// conversion; used for desired-attitude construction in the control loop.
Eigen::Matrix3d rotation_from_euler_quaternion(const Eigen::Vector3d& zeta);

/// Euler angles (phi, theta, psi) recovered from a rotation matrix, theta
/// clamped into [-pi/2, pi/2].
Eigen::Vector3d euler_from_rotation(const Eigen::Matrix3d& r);

/// Euler-rate transformation Lambda with zeta_dot = Lambda * omega.
/// Throws std::domain_error at the |theta| = pi/2 singularity.
Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& zeta);

/// Gram-Schmidt re-orthonormalization of a near-rotation matrix (column
/// version, preserves handedness for inputs close to SO(3)).
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r);

}  // namespace ctph
