#pragma once

#include <Eigen/Core>

namespace osc {

/// Planar rigid transform taking points of the current frame into the
/// candidate frame: p_cand = R(dtheta) * p_curr + (dx, dy).
struct RelativePose {
  double dx = 0.0;      // m
  double dy = 0.0;      // m
  double dtheta = 0.0;  // rad, in (-pi, pi]
};

/// Normalizes an angle into (-pi, pi].
double WrapAngle(double angle);

/// Yaw of a column offset: 2*pi*n / num_sectors. Throws kPrecondition unless
/// 0 <= n < num_sectors.
double ShiftToAngle(int n, int num_sectors);

/// Closed-form pose from one Main Object seen at `obs_candidate` in the
/// candidate frame and at `obs_current` in the current frame, given the yaw
/// `gamma` of the column offset that aligned their descriptors:
///
///   dtheta = atan2(y1, x1) - gamma - atan2(y2, x2)
///   dx     = x1 - x2 cos(dtheta) + y2 sin(dtheta)
///   dy     = y1 - x2 sin(dtheta) - y2 cos(dtheta)
///
/// gamma is used unnegated. The candidate descriptor is matched against the
/// current descriptor shifted left by n columns, so a point's angle in the
/// current descriptor exceeds its angle in the candidate descriptor by gamma.
/// Throws kPrecondition if either observation is at the origin.
RelativePose ComputeRelativePose(const Eigen::Vector2d& obs_candidate,
                                 const Eigen::Vector2d& obs_current,
                                 double gamma);

/// Applies the pose to a point of the current frame.
Eigen::Vector2d TransformPoint(const RelativePose& pose,
                               const Eigen::Vector2d& p);

/// Inverse transform (candidate -> current).
RelativePose Inverse(const RelativePose& pose);

}  // namespace osc
