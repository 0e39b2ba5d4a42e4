#include "osc/object_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "osc/error.hpp"

namespace osc {

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t Find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // The smaller root wins so every root is its set's smallest member.
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

PointSubset FilterSemantic(const PointCloud& cloud,
                           const SemanticLabels& labels,
                           const std::set<std::uint16_t>& classes) {
  if (cloud.points.size() != labels.class_ids.size()) {
    throw Error(ErrorCategory::kPrecondition,
                "cloud has " + std::to_string(cloud.points.size()) +
                    " points but " + std::to_string(labels.class_ids.size()) +
                    " labels");
  }
  PointSubset subset;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (classes.contains(labels.class_ids[i])) {
      subset.points.push_back(cloud.points[i]);
      subset.source_indices.push_back(i);
    }
  }
  return subset;
}

std::vector<Cluster> EuclideanCluster(std::span<const Eigen::Vector3d> points,
                                      double tolerance,
                                      std::size_t min_points) {
  if (!(tolerance > 0.0)) {
    throw Error(ErrorCategory::kPrecondition, "cluster tolerance must be > 0");
  }
  const std::size_t n = points.size();
  // Cells of edge `tolerance`: every neighbor within tolerance lies in one of
  // the 27 surrounding cells.
  auto cell_of = [tolerance](const Eigen::Vector3d& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x() / tolerance)),
                   static_cast<std::int64_t>(std::floor(p.y() / tolerance)),
                   static_cast<std::int64_t>(std::floor(p.z() / tolerance))};
  };
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid[cell_of(points[i])].push_back(i);

  const double tol2 = tolerance * tolerance;
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CellKey c = cell_of(points[i]);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == grid.end()) continue;
          for (const std::size_t j : it->second) {
            if (j <= i) continue;
            if ((points[i] - points[j]).squaredNorm() <= tol2) sets.Union(i, j);
          }
        }
      }
    }
  }

  // Roots are smallest members, so visiting indices in order yields clusters
  // already sorted by smallest member, each with sorted members.
  std::vector<Cluster> clusters;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.Find(i);
    if (slot[root] == n) {
      slot[root] = clusters.size();
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(i);
  }
  std::erase_if(clusters,
                [min_points](const Cluster& c) { return c.size() < min_points; });
  return clusters;
}

std::vector<MainObject> ExtractMainObjects(const PointCloud& cloud,
                                           const SemanticLabels& labels,
                                           const OscConfig& config) {
  const PointSubset subset =
      FilterSemantic(cloud, labels, config.main_object_classes);
  std::vector<Eigen::Vector3d> xyz;
  xyz.reserve(subset.points.size());
  for (const auto& p : subset.points) xyz.emplace_back(p.x, p.y, p.z);

  const auto clusters =
      EuclideanCluster(xyz, config.cluster_tolerance,
                       static_cast<std::size_t>(config.cluster_min_points));

  std::vector<MainObject> objects;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    double sx = 0.0, sy = 0.0;
    for (const std::size_t i : clusters[k]) {
      sx += xyz[i].x();
      sy += xyz[i].y();
    }
    MainObject obj;
    obj.frame_id = cloud.frame_id;
    obj.object_index = static_cast<std::uint32_t>(k);
    obj.point_count = clusters[k].size();
    obj.centroid_x = sx / static_cast<double>(obj.point_count);
    obj.centroid_y = sy / static_cast<double>(obj.point_count);
    if (std::hypot(obj.centroid_x, obj.centroid_y) < config.min_object_range) {
      continue;
    }
    objects.push_back(obj);
  }
  std::sort(objects.begin(), objects.end(),
            [](const MainObject& a, const MainObject& b) {
              if (a.point_count != b.point_count) {
                return a.point_count > b.point_count;
              }
              return a.object_index < b.object_index;
            });
  return objects;
}

}  // namespace osc
