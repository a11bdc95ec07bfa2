#include "ctph/sim/so3.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctph {

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m <<      0, -w.z(),  w.y(),
        w.z(),      0, -w.x(),
       -w.y(),  w.x(),      0;
  return m;
}

Eigen::Vector3d vex(const Eigen::Matrix3d& a) {
  if (((a + a.transpose()).cwiseAbs().maxCoeff()) > 1e-9) {
    throw std::invalid_argument("vex: matrix is not skew-symmetric");
  }
  return {a(2, 1), a(0, 2), a(1, 0)};
}

Eigen::Matrix3d rotation_from_euler(const Eigen::Vector3d& zeta) {
  if (std::abs(zeta.y()) >= std::numbers::pi / 2) {
    throw std::domain_error("rotation_from_euler: |theta| >= pi/2");
  }
  const double sp = std::sin(zeta.x()), cp = std::cos(zeta.x());
  const double st = std::sin(zeta.y()), ct = std::cos(zeta.y());
  const double ss = std::sin(zeta.z()), cs = std::cos(zeta.z());
  Eigen::Matrix3d r;
  r << cs * ct, cs * st * sp - ss * cp, cs * st * cp + ss * sp,
       ss * ct, ss * st * sp + cs * cp, ss * st * cp - cs * sp,
           -st,                ct * sp,                ct * cp;
  return r;
}

Eigen::Matrix3d rotation_from_euler_quaternion(const Eigen::Vector3d& zeta) {
  Eigen::Quaterniond q =
      Eigen::AngleAxisd(zeta.z(), Eigen::Vector3d::UnitZ()) *
      Eigen::AngleAxisd(zeta.y(), Eigen::Vector3d::UnitY()) *
      Eigen::AngleAxisd(zeta.x(), Eigen::Vector3d::UnitX());
  q.normalize();
  return q.toRotationMatrix();
}

Eigen::Vector3d euler_from_rotation(const Eigen::Matrix3d& r) {
  const double st = std::clamp(-r(2, 0), -1.0, 1.0);
  return {std::atan2(r(2, 1), r(2, 2)), std::asin(st),
          std::atan2(r(1, 0), r(0, 0))};
}

Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& zeta) {
  const double ct = std::cos(zeta.y());
  if (std::abs(ct) < 1e-9) {
    throw std::domain_error("euler_rate_matrix: singular at |theta| = pi/2");
  }
  const double sp = std::sin(zeta.x()), cp = std::cos(zeta.x());
  const double tt = std::tan(zeta.y());
  Eigen::Matrix3d lam;
  lam << 1, sp * tt, cp * tt,
         0,      cp,     -sp,
         0, sp / ct, cp / ct;
  return lam;
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r) {
  Eigen::Matrix3d q;
  q.col(0) = r.col(0).normalized();
  q.col(1) = (r.col(1) - q.col(0).dot(r.col(1)) * q.col(0)).normalized();
  q.col(2) = q.col(0).cross(q.col(1));
  return q;
}

}  // namespace ctph
