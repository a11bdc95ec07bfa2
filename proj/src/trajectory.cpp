#include "ctph/eval/trajectory.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace ctph {

namespace {

// Square path vertices, traversed in order and closed back to the first.
const std::array<Eigen::Vector3d, 4> kSquareVertices = {
    Eigen::Vector3d{1.5, 1.5, -1.0}, Eigen::Vector3d{-1.5, 1.5, -1.0},
    Eigen::Vector3d{-1.5, -1.5, 1.0}, Eigen::Vector3d{1.5, -1.5, 1.0}};

double wrap_period(double t, double period) {
  const double s = std::fmod(t, period);
  return s < 0.0 ? s + period : s;
}

}  // namespace

TrajectoryKind trajectory_from_name(const std::string& name) {
  if (name == "point") return TrajectoryKind::point;
  if (name == "ellipse") return TrajectoryKind::ellipse;
  if (name == "square") return TrajectoryKind::square;
  throw std::invalid_argument("unknown trajectory: " + name);
}

const char* trajectory_name(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::point: return "point";
    case TrajectoryKind::ellipse: return "ellipse";
    case TrajectoryKind::square: return "square";
  }
  return "point";
}

TrajectoryRef TrajectoryRef::point(const Eigen::Vector3d& target, double psi) {
  TrajectoryRef ref;
  ref.kind_ = TrajectoryKind::point;
  ref.target_ = target;
  ref.psi_ = psi;
  ref.period_ = 1.0;  // any positive value; the reference is constant
  return ref;
}

TrajectoryRef TrajectoryRef::ellipse(double semi_x, double semi_y,
                                     double period, double z) {
  if (semi_x <= 0.0 || semi_y <= 0.0 || period <= 0.0) {
    throw std::invalid_argument("ellipse parameters must be positive");
  }
  TrajectoryRef ref;
  ref.kind_ = TrajectoryKind::ellipse;
  ref.semi_x_ = semi_x;
  ref.semi_y_ = semi_y;
  ref.period_ = period;
  ref.z_ = z;
  return ref;
}

TrajectoryRef TrajectoryRef::square(double period, double yaw_amplitude) {
  if (period <= 0.0) throw std::invalid_argument("period must be positive");
  TrajectoryRef ref;
  ref.kind_ = TrajectoryKind::square;
  ref.period_ = period;
  ref.yaw_amplitude_ = yaw_amplitude;
  return ref;
}

Eigen::Vector3d TrajectoryRef::position(double t) const {
  switch (kind_) {
    case TrajectoryKind::point:
      return target_;
    case TrajectoryKind::ellipse: {
      const double w = 2.0 * M_PI * wrap_period(t, period_) / period_;
      return {semi_x_ * std::cos(w), semi_y_ * std::sin(w), z_};
    }
    case TrajectoryKind::square:
      break;
  }
  // Constant-speed walk along the closed polygon.
  std::array<double, 4> lengths;
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    lengths[i] = (kSquareVertices[(i + 1) % 4] - kSquareVertices[i]).norm();
    total += lengths[i];
  }
  double s = total * wrap_period(t, period_) / period_;
  for (int i = 0; i < 4; ++i) {
    if (s <= lengths[i] || i == 3) {
      const double u = std::min(1.0, s / lengths[i]);
      return kSquareVertices[i] +
             u * (kSquareVertices[(i + 1) % 4] - kSquareVertices[i]);
    }
    s -= lengths[i];
  }
  return kSquareVertices[0];  // unreachable
}

double TrajectoryRef::yaw(double t) const {
  if (kind_ == TrajectoryKind::square) {
    return yaw_amplitude_ * std::sin(2.0 * M_PI * t / period_);
  }
  return kind_ == TrajectoryKind::point ? psi_ : 0.0;
}

}  // namespace ctph
