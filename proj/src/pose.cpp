#include "osc/pose.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "osc/error.hpp"

namespace osc {

double WrapAngle(double angle) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double ShiftToAngle(int n, int num_sectors) {
  if (n < 0 || n >= num_sectors) {
    throw Error(ErrorCategory::kPrecondition,
                "offset " + std::to_string(n) + " outside [0, " +
                    std::to_string(num_sectors) + ")");
  }
  return 2.0 * std::numbers::pi * n / num_sectors;
}

RelativePose ComputeRelativePose(const Eigen::Vector2d& obs_candidate,
                                 const Eigen::Vector2d& obs_current,
                                 double gamma) {
  if (obs_candidate.isZero(0.0) || obs_current.isZero(0.0)) {
    throw Error(ErrorCategory::kPrecondition,
                "object observation at the sensor origin has no bearing");
  }
  const double x1 = obs_candidate.x(), y1 = obs_candidate.y();
  const double x2 = obs_current.x(), y2 = obs_current.y();
  RelativePose pose;
  pose.dtheta = WrapAngle(std::atan2(y1, x1) - WrapAngle(gamma) -
                          std::atan2(y2, x2));
  const double c = std::cos(pose.dtheta);
  const double s = std::sin(pose.dtheta);
  pose.dx = x1 - x2 * c + y2 * s;
  pose.dy = y1 - x2 * s - y2 * c;
  return pose;
}

Eigen::Vector2d TransformPoint(const RelativePose& pose,
                               const Eigen::Vector2d& p) {
  const double c = std::cos(pose.dtheta);
  const double s = std::sin(pose.dtheta);
  return {pose.dx + c * p.x() - s * p.y(), pose.dy + s * p.x() + c * p.y()};
}

RelativePose Inverse(const RelativePose& pose) {
  const double c = std::cos(pose.dtheta);
  const double s = std::sin(pose.dtheta);
  RelativePose inv;
  inv.dtheta = WrapAngle(-pose.dtheta);
  inv.dx = -(c * pose.dx + s * pose.dy);
  inv.dy = -(-s * pose.dx + c * pose.dy);
  return inv;
}

}  // namespace osc
