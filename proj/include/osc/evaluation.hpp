#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "osc/config.hpp"
#include "osc/dataset_io.hpp"
#include "osc/filtering.hpp"
#include "osc/pose.hpp"

namespace osc {

struct LabeledPair {
  std::uint32_t frame_a = 0;  // a < b
  std::uint32_t frame_b = 0;
  bool is_positive = false;
  double distance = 0.0;   // ground-truth sensor distance, m
  RelativePose gt_pose;    // frame b in frame a, planar projection
};

/// Planar (x, y, yaw) projection of b's pose expressed in a's frame.
RelativePose PlanarRelativePose(const FramePose& a, const FramePose& b);

/// Samples positives (distance < positive_distance and frame gap >=
/// min_frame_gap) and negatives (distance > positive_distance) uniformly
/// without replacement. A pool smaller than requested is taken whole.
/// Output: positives then negatives, each sorted by pose position; frame_a
/// is the earlier pose. The gap is measured in frame ids.
std::vector<LabeledPair> SamplePairs(std::span<const FramePose> poses,
                                     const OscConfig& config,
                                     std::size_t count_pos,
                                     std::size_t count_neg,
                                     std::uint64_t seed);

struct ScoredLabel {
  double score = 0.0;
  bool is_positive = false;
};

struct PrPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
};

/// One point per distinct score, a pair being predicted positive when its
/// score is >= the threshold. Ordered by descending threshold, i.e.
/// ascending recall. Throws kPrecondition without any positive.
std::vector<PrPoint> PrCurve(std::span<const ScoredLabel> scores);

/// Max over the curve of 2PR / (P + R), 0 where P + R = 0.
double F1Max(std::span<const PrPoint> curve);

struct PoseError {
  double translation = 0.0;  // m
  double rotation = 0.0;     // rad, in [0, pi]
};

PoseError ComputePoseError(const RelativePose& estimate,
                           const RelativePose& truth);

/// Per-frame Main Object descriptors, computed on demand.
using DescriptorSource =
    std::function<std::vector<ObjectScanContext>(std::uint32_t frame_id)>;

struct EvaluationSummary {
  double f1_max = 0.0;
  std::size_t num_positive = 0;
  std::size_t num_negative = 0;
  std::size_t accepted_positive = 0;
  std::size_t accepted_negative = 0;
  double mean_translation_error = 0.0;  // over accepted positives; NaN if none
  double median_translation_error = 0.0;
  double mean_rotation_error = 0.0;
  double median_rotation_error = 0.0;
};

struct EvaluationReport {
  std::vector<LabeledPair> pairs;
  std::vector<PlaceMatch> matches;  // parallel to pairs
  std::vector<PrPoint> curve;
  EvaluationSummary summary;
};

/// Matches every pair (frame_a as q, frame_b as c) and scores it with the
/// PlaceMatch similarity when accepted, 0 when rejected.
EvaluationReport Evaluate(std::vector<LabeledPair> pairs,
                          const DescriptorSource& descriptors,
                          const OscConfig& config);

}  // namespace osc
