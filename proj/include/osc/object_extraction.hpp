#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "osc/config.hpp"
#include "osc/dataset_io.hpp"

namespace osc {

/// A clustered salient object, reduced to its planar centroid in the sensor
/// frame of `frame_id`.
struct MainObject {
  std::uint32_t frame_id = 0;
  std::uint32_t object_index = 0;  // unique within the frame
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  std::size_t point_count = 0;

  bool operator==(const MainObject&) const = default;
};

/// Subset of a cloud together with the indices the points had in it.
struct PointSubset {
  std::vector<Point> points;
  std::vector<std::size_t> source_indices;
};

/// Keeps the points whose class id is in `classes`, preserving order.
PointSubset FilterSemantic(const PointCloud& cloud,
                           const SemanticLabels& labels,
                           const std::set<std::uint16_t>& classes);

using Cluster = std::vector<std::size_t>;

/// Single-linkage Euclidean clustering: two points share a cluster iff a chain
/// of points with consecutive distances <= `tolerance` connects them.
/// Clusters smaller than `min_points` are dropped. Member indices are sorted;
/// clusters are ordered by their smallest member.
std::vector<Cluster> EuclideanCluster(std::span<const Eigen::Vector3d> points,
                                      double tolerance,
                                      std::size_t min_points);

/// FilterSemantic + EuclideanCluster + planar centroid + range cut. Sorted by
/// descending point_count, then ascending object_index.
std::vector<MainObject> ExtractMainObjects(const PointCloud& cloud,
                                           const SemanticLabels& labels,
                                           const OscConfig& config);

}  // namespace osc
