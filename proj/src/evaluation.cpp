#include "osc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "osc/error.hpp"
#include "osc/random.hpp"

namespace osc {

namespace {

using PairKey = std::pair<std::uint32_t, std::uint32_t>;

double Distance(const FramePose& a, const FramePose& b) {
  return (a.translation - b.translation).norm();
}

// Partial Fisher-Yates: a uniform subset of `count` elements, sorted.
std::vector<PairKey> SampleSubset(std::vector<PairKey> pool, std::size_t count,
                                  Rng& rng) {
  count = std::min(count, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + UniformIndex(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

double Median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

RelativePose PlanarRelativePose(const FramePose& a, const FramePose& b) {
  const Eigen::Matrix3d r = a.rotation.transpose() * b.rotation;
  const Eigen::Vector3d t = a.rotation.transpose() * (b.translation - a.translation);
  return {t.x(), t.y(), WrapAngle(std::atan2(r(1, 0), r(0, 0)))};
}

std::vector<LabeledPair> SamplePairs(std::span<const FramePose> poses,
                                     const OscConfig& config,
                                     std::size_t count_pos,
                                     std::size_t count_neg,
                                     std::uint64_t seed) {
  const std::size_t n = poses.size();
  const double limit = config.positive_distance;
  const auto gap = static_cast<std::size_t>(config.min_frame_gap);

  std::vector<PairKey> positives;
  std::size_t negative_count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = Distance(poses[a], poses[b]);
      const std::size_t frame_gap = poses[b].frame_id > poses[a].frame_id
                                        ? poses[b].frame_id - poses[a].frame_id
                                        : poses[a].frame_id - poses[b].frame_id;
      if (d < limit && frame_gap >= gap) {
        positives.emplace_back(a, b);
      } else if (d > limit) {
        ++negative_count;
      }
    }
  }

  Rng rng(seed);
  positives = SampleSubset(std::move(positives), count_pos, rng);

  std::vector<PairKey> negatives;
  const std::size_t want_neg = std::min(count_neg, negative_count);
  if (negative_count <= 4 * want_neg) {
    std::vector<PairKey> pool;
    pool.reserve(negative_count);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (Distance(poses[a], poses[b]) > limit) pool.emplace_back(a, b);
      }
    }
    negatives = SampleSubset(std::move(pool), want_neg, rng);
  } else {
    // Pool is at least 4x the request: rejection sampling over all pairs
    // terminates quickly and stays uniform.
    std::set<PairKey> chosen;
    while (chosen.size() < want_neg) {
      auto a = static_cast<std::uint32_t>(UniformIndex(rng, n));
      auto b = static_cast<std::uint32_t>(UniformIndex(rng, n));
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      if (Distance(poses[a], poses[b]) > limit) chosen.emplace(a, b);
    }
    negatives.assign(chosen.begin(), chosen.end());
  }

  std::vector<LabeledPair> pairs;
  auto emit = [&](const std::vector<PairKey>& keys, bool positive) {
    for (const auto& [a, b] : keys) {
      LabeledPair p;
      p.frame_a = poses[a].frame_id;
      p.frame_b = poses[b].frame_id;
      p.is_positive = positive;
      p.distance = Distance(poses[a], poses[b]);
      p.gt_pose = PlanarRelativePose(poses[a], poses[b]);
      pairs.push_back(p);
    }
  };
  emit(positives, true);
  emit(negatives, false);
  return pairs;
}

std::vector<PrPoint> PrCurve(std::span<const ScoredLabel> scores) {
  const auto total_pos = static_cast<std::size_t>(std::count_if(
      scores.begin(), scores.end(),
      [](const ScoredLabel& s) { return s.is_positive; }));
  if (total_pos == 0) {
    throw Error(ErrorCategory::kPrecondition,
                "precision-recall curve needs at least one positive pair");
  }
  std::vector<ScoredLabel> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) {
              return a.score > b.score;
            });

  std::vector<PrPoint> curve;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double threshold = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == threshold; ++i) {
      (sorted[i].is_positive ? tp : fp) += 1;
    }
    PrPoint p;
    p.threshold = threshold;
    p.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    p.recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    curve.push_back(p);
  }
  return curve;
}

double F1Max(std::span<const PrPoint> curve) {
  double best = 0.0;
  for (const auto& p : curve) {
    const double sum = p.precision + p.recall;
    if (sum > 0.0) best = std::max(best, 2.0 * p.precision * p.recall / sum);
  }
  return best;
}

PoseError ComputePoseError(const RelativePose& estimate,
                           const RelativePose& truth) {
  PoseError e;
  e.translation = std::hypot(estimate.dx - truth.dx, estimate.dy - truth.dy);
  e.rotation = std::abs(WrapAngle(estimate.dtheta - truth.dtheta));
  return e;
}

EvaluationReport Evaluate(std::vector<LabeledPair> pairs,
                          const DescriptorSource& descriptors,
                          const OscConfig& config) {
  EvaluationReport report;
  report.pairs = std::move(pairs);

  std::map<std::uint32_t, std::vector<ObjectScanContext>> cache;
  auto frame = [&](std::uint32_t id) -> const std::vector<ObjectScanContext>& {
    auto it = cache.find(id);
    if (it == cache.end()) it = cache.emplace(id, descriptors(id)).first;
    return it->second;
  };

  std::vector<ScoredLabel> scores;
  std::vector<double> trans_err, rot_err;
  auto& s = report.summary;
  for (const auto& pair : report.pairs) {
    PlaceMatch m = MatchFrames(frame(pair.frame_a), frame(pair.frame_b), config);
    m.frame_q = pair.frame_a;
    m.frame_c = pair.frame_b;
    scores.push_back({m.accepted ? m.similarity : 0.0, pair.is_positive});
    if (pair.is_positive) {
      ++s.num_positive;
      if (m.accepted) {
        ++s.accepted_positive;
        const PoseError e = ComputePoseError(m.fused_pose, pair.gt_pose);
        trans_err.push_back(e.translation);
        rot_err.push_back(e.rotation);
      }
    } else {
      ++s.num_negative;
      if (m.accepted) ++s.accepted_negative;
    }
    report.matches.push_back(std::move(m));
  }

  report.curve = PrCurve(scores);
  s.f1_max = F1Max(report.curve);
  s.mean_translation_error = Mean(trans_err);
  s.median_translation_error = Median(trans_err);
  s.mean_rotation_error = Mean(rot_err);
  s.median_rotation_error = Median(rot_err);
  return report;
}

}  // namespace osc
