#pragma once

#include <cmath>

namespace graphnav {

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

/// Planar pose (x, y in meters, theta in radians).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Composes pose `a` with a delta expressed in a's frame.
inline Pose2 compose(const Pose2& a, const Pose2& delta) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose2{a.x + c * delta.x - s * delta.y,
               a.y + s * delta.x + c * delta.y,
               wrap_angle(a.theta + delta.theta)};
}

/// Pose of `b` expressed in a's frame.
inline Pose2 relative_pose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return Pose2{c * dx + s * dy, -s * dx + c * dy, wrap_angle(b.theta - a.theta)};
}

inline double distance(const Pose2& a, const Pose2& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace graphnav
