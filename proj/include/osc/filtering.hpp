#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osc/config.hpp"
#include "osc/descriptor.hpp"
#include "osc/matching.hpp"
#include "osc/pose.hpp"

namespace osc {

/// All m x n descriptor-pair results of two frames, row-major: row i is the
/// i-th descriptor of frame q, column j the j-th of frame c.
struct MatchTable {
  int rows = 0;
  int cols = 0;
  std::vector<MatchResult> cells;

  const MatchResult& at(int i, int j) const {
    return cells[static_cast<std::size_t>(i * cols + j)];
  }
};

MatchTable BuildMatchTable(std::span<const ObjectScanContext> descriptors_q,
                           std::span<const ObjectScanContext> descriptors_c,
                           const OscConfig& config);

/// Repeatedly takes the highest remaining similarity whose two objects are
/// both unused, then marks both. Returns min(m, n) results in selection order.
/// Equal similarities go to the smaller q object_index, then the smaller c
/// object_index.
std::vector<MatchResult> GreedySelect(const MatchTable& table);

/// Keeps results with similarity >= threshold, order preserved.
std::vector<MatchResult> ThresholdFilter(std::span<const MatchResult> selected,
                                         double threshold);

struct PoseCluster {
  bool accepted = false;
  RelativePose fused;
  int support = 0;  // size of the largest cluster
  std::vector<std::size_t> members;  // indices into the input hypotheses
};

/// Embeds each pose as (dx, dy, pose_angle_scale * dtheta), with angles
/// unwrapped around the first hypothesis, and single-linkage clusters them at
/// pose_cluster_tolerance. The largest cluster wins; ties go to the cluster
/// holding the most similar hypothesis (or the earliest one when
/// `similarities` is empty). Rejects when the cluster has fewer than
/// ceil(pose_min_cluster_fraction * poses.size()) members.
PoseCluster ClusterPoseHypotheses(std::span<const RelativePose> poses,
                                  std::span<const double> similarities,
                                  const OscConfig& config);

/// Decision for one frame pair.
struct PlaceMatch {
  std::uint32_t frame_q = 0;
  std::uint32_t frame_c = 0;
  bool accepted = false;
  double similarity = 0.0;  // best surviving similarity, 0 if none
  RelativePose fused_pose;  // meaningful iff accepted
  int support = 0;
  std::vector<MatchResult> hypotheses;  // greedy picks that passed threshold
};

/// Full frame-pair pipeline: match table -> greedy selection -> threshold ->
/// pose clustering. Frame ids come from the descriptors; an empty side yields
/// an immediate reject.
PlaceMatch MatchFrames(std::span<const ObjectScanContext> descriptors_q,
                       std::span<const ObjectScanContext> descriptors_c,
                       const OscConfig& config);

}  // namespace osc
