#pragma once

#include <Eigen/Dense>

#include <string>

namespace ctph {

enum class TrajectoryKind { point, ellipse, square };

TrajectoryKind trajectory_from_name(const std::string& name);
const char* trajectory_name(TrajectoryKind kind);

/// Periodic position/yaw reference. The ellipse lies in the horizontal
/// plane; the square interpolates four 3D vertices at constant speed with a
/// sinusoidal yaw profile.
class TrajectoryRef {
 public:
  static TrajectoryRef point(const Eigen::Vector3d& target, double psi = 0.0);
  static TrajectoryRef ellipse(double semi_x = 1.5, double semi_y = 1.0,
                               double period = 15.0, double z = 0.0);
  static TrajectoryRef square(double period = 30.0,
                              double yaw_amplitude = 2.0 * M_PI / 3.0);

  Eigen::Vector3d position(double t) const;
  double yaw(double t) const;

  TrajectoryKind kind() const { return kind_; }
  double period() const { return period_; }

 private:
  TrajectoryRef() = default;

  TrajectoryKind kind_ = TrajectoryKind::point;
  double period_ = 0.0;
  Eigen::Vector3d target_ = Eigen::Vector3d::Zero();
  double psi_ = 0.0;
  double semi_x_ = 0.0, semi_y_ = 0.0, z_ = 0.0;  // ellipse
  double yaw_amplitude_ = 0.0;                    // square
};

}  // namespace ctph
