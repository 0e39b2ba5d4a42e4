#include "osc/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osc/object_extraction.hpp"

namespace osc {

MatchTable BuildMatchTable(std::span<const ObjectScanContext> descriptors_q,
                           std::span<const ObjectScanContext> descriptors_c,
                           const OscConfig& config) {
  MatchTable table;
  table.rows = static_cast<int>(descriptors_q.size());
  table.cols = static_cast<int>(descriptors_c.size());
  table.cells.reserve(descriptors_q.size() * descriptors_c.size());
  for (const auto& q : descriptors_q) {
    for (const auto& c : descriptors_c) {
      table.cells.push_back(MatchPair(q, c, config));
    }
  }
  return table;
}

std::vector<MatchResult> GreedySelect(const MatchTable& table) {
  std::vector<std::size_t> order(table.cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const MatchResult& ra = table.cells[a];
    const MatchResult& rb = table.cells[b];
    if (ra.similarity != rb.similarity) return ra.similarity > rb.similarity;
    if (ra.ref_q.object_index != rb.ref_q.object_index) {
      return ra.ref_q.object_index < rb.ref_q.object_index;
    }
    return ra.ref_c.object_index < rb.ref_c.object_index;
  });

  std::vector<bool> used_row(static_cast<std::size_t>(table.rows), false);
  std::vector<bool> used_col(static_cast<std::size_t>(table.cols), false);
  std::vector<MatchResult> selected;
  const auto limit = static_cast<std::size_t>(std::min(table.rows, table.cols));
  for (const std::size_t idx : order) {
    if (selected.size() == limit) break;
    const std::size_t i = idx / static_cast<std::size_t>(table.cols);
    const std::size_t j = idx % static_cast<std::size_t>(table.cols);
    if (used_row[i] || used_col[j]) continue;
    used_row[i] = true;
    used_col[j] = true;
    selected.push_back(table.cells[idx]);
  }
  return selected;
}

std::vector<MatchResult> ThresholdFilter(std::span<const MatchResult> selected,
                                         double threshold) {
  std::vector<MatchResult> kept;
  for (const auto& r : selected) {
    if (r.similarity >= threshold) kept.push_back(r);
  }
  return kept;
}

PoseCluster ClusterPoseHypotheses(std::span<const RelativePose> poses,
                                  std::span<const double> similarities,
                                  const OscConfig& config) {
  PoseCluster result;
  if (poses.empty()) return result;

  const double reference = poses.front().dtheta;
  std::vector<double> unwrapped(poses.size());
  std::vector<Eigen::Vector3d> embedded(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    unwrapped[i] = reference + WrapAngle(poses[i].dtheta - reference);
    embedded[i] = {poses[i].dx, poses[i].dy,
                   config.pose_angle_scale * unwrapped[i]};
  }
  const auto clusters =
      EuclideanCluster(embedded, config.pose_cluster_tolerance, 1);

  // Hypothesis that decides ties between equally large clusters.
  std::size_t anchor = 0;
  if (similarities.size() == poses.size()) {
    anchor = static_cast<std::size_t>(
        std::max_element(similarities.begin(), similarities.end()) -
        similarities.begin());
  }
  const Cluster* best = nullptr;
  bool best_has_anchor = false;
  for (const auto& cluster : clusters) {
    const bool has_anchor =
        std::find(cluster.begin(), cluster.end(), anchor) != cluster.end();
    if (best == nullptr || cluster.size() > best->size() ||
        (cluster.size() == best->size() && has_anchor && !best_has_anchor)) {
      best = &cluster;
      best_has_anchor = has_anchor;
    }
  }

  double sx = 0.0, sy = 0.0, st = 0.0;
  for (const std::size_t i : *best) {
    sx += poses[i].dx;
    sy += poses[i].dy;
    st += unwrapped[i];
  }
  const double n = static_cast<double>(best->size());
  result.fused = {sx / n, sy / n, WrapAngle(st / n)};
  result.support = static_cast<int>(best->size());
  result.members = *best;

  // The small slack keeps e.g. (1/3) * 3 from rounding up to 2.
  const double needed = std::max(
      1.0, std::ceil(config.pose_min_cluster_fraction *
                         static_cast<double>(poses.size()) -
                     1e-9));
  result.accepted = result.support >= needed;
  return result;
}

PlaceMatch MatchFrames(std::span<const ObjectScanContext> descriptors_q,
                       std::span<const ObjectScanContext> descriptors_c,
                       const OscConfig& config) {
  PlaceMatch match;
  if (!descriptors_q.empty()) match.frame_q = descriptors_q.front().object.frame_id;
  if (!descriptors_c.empty()) match.frame_c = descriptors_c.front().object.frame_id;
  if (descriptors_q.empty() || descriptors_c.empty()) return match;

  const MatchTable table = BuildMatchTable(descriptors_q, descriptors_c, config);
  const auto selected = GreedySelect(table);
  match.hypotheses = ThresholdFilter(selected, config.similarity_threshold);
  if (match.hypotheses.empty()) return match;

  std::vector<RelativePose> poses;
  std::vector<double> similarities;
  for (const auto& h : match.hypotheses) {
    poses.push_back(h.relative_pose);
    similarities.push_back(h.similarity);
    match.similarity = std::max(match.similarity, h.similarity);
  }
  const PoseCluster cluster = ClusterPoseHypotheses(poses, similarities, config);
  match.support = cluster.support;
  match.accepted = cluster.accepted;
  if (cluster.accepted) match.fused_pose = cluster.fused;
  return match;
}

}  // namespace osc
