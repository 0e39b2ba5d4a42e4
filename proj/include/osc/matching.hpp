#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <shared_mutex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "osc/config.hpp"
#include "osc/descriptor.hpp"
#include "osc/pose.hpp"

namespace osc {

/// Identifies a descriptor by the object it is centred on.
struct DescriptorRef {
  std::uint32_t frame_id = 0;
  std::uint32_t object_index = 0;

  auto operator<=>(const DescriptorRef&) const = default;
};

inline DescriptorRef RefOf(const ObjectScanContext& osc) {
  return {osc.object.frame_id, osc.object.object_index};
}

struct Neighbor {
  DescriptorRef ref;
  double distance = 0.0;  // L2 between ring keys
};

/// Exact k-nearest-neighbour index over RingKeys (L2), backed by a kd-tree
/// grown by insertion. One writer or many concurrent readers.
class DescriptorIndex {
 public:
  explicit DescriptorIndex(int dimension);
  ~DescriptorIndex();

  DescriptorIndex(const DescriptorIndex&) = delete;
  DescriptorIndex& operator=(const DescriptorIndex&) = delete;

  /// Throws kPrecondition if the key length differs from the dimension.
  void Insert(const Eigen::VectorXd& ring_key, DescriptorRef ref);
  void Insert(const ObjectScanContext& osc) { Insert(osc.ring_key, RefOf(osc)); }

  /// The k nearest entries sorted by ascending distance; equal distances keep
  /// insertion order.
  std::vector<Neighbor> Query(const Eigen::VectorXd& ring_key, int k) const;

  std::size_t size() const;
  int dimension() const { return dimension_; }

 private:
  struct Tree;

  int dimension_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<Tree> tree_;
};

/// Union over `queries` of the frames owning each query's k nearest keys,
/// minus frames for which `exclude` returns true.
std::set<std::uint32_t> QueryCandidateFrames(
    const DescriptorIndex& index, std::span<const ObjectScanContext> queries,
    int k, const std::function<bool(std::uint32_t)>& exclude = {});

/// Coarse column offset from SectorKeys: argmin over s in [0, N) of
/// ||key_q - RotateLeft(key_c, s)||, smallest s on ties.
int EstimateShift(const Eigen::VectorXd& sector_key_q,
                  const Eigen::VectorXd& sector_key_c);

/// Mean column cosine distance between two same-shaped grids, averaged over
/// the columns where both sides are nonzero. 1 when no such column exists.
double DescriptorDistance(const Eigen::MatrixXd& matrix_q,
                          const Eigen::MatrixXd& matrix_c);

/// DescriptorDistance(matrix_q, RotateColumns(matrix_c, n)) without
/// materializing the rotated grid; bit-identical result.
double ShiftedDescriptorDistance(const Eigen::MatrixXd& matrix_q,
                                 const Eigen::MatrixXd& matrix_c, int n);

struct DescriptorMatch {
  int offset = 0;  // precise column offset n in [0, N_s)
  double similarity = 0.0;
};

/// Refines the SectorKey shift over the circular window [shift-k, shift+k]
/// and reports 1 - (minimum distance). Ties go to the offset closest to the
/// coarse shift, then the smaller offset.
DescriptorMatch MatchDescriptors(const ObjectScanContext& osc_q,
                                 const ObjectScanContext& osc_c,
                                 const OscConfig& config);

/// One descriptor pair, matched and turned into a pose hypothesis. Side q is
/// the reference (older / candidate) frame, side c the frame being placed.
struct MatchResult {
  DescriptorRef ref_q;
  DescriptorRef ref_c;
  int offset = 0;
  double similarity = 0.0;
  RelativePose relative_pose;  // maps frame c points into frame q
};

/// MatchDescriptors followed by ComputeRelativePose on the two objects.
MatchResult MatchPair(const ObjectScanContext& osc_q,
                      const ObjectScanContext& osc_c, const OscConfig& config);

}  // namespace osc
