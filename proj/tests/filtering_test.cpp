#include "osc/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "osc/commands.hpp"
#include "osc/synthetic.hpp"
#include "test_support.hpp"

namespace osc {
namespace {

constexpr double kPi = std::numbers::pi;

MatchResult Cell(std::uint32_t qi, std::uint32_t ci, double similarity,
                 RelativePose pose = {}) {
  MatchResult r;
  r.ref_q = {1, qi};
  r.ref_c = {2, ci};
  r.similarity = similarity;
  r.relative_pose = pose;
  return r;
}

MatchTable Table(const std::vector<std::vector<double>>& sims) {
  MatchTable t;
  t.rows = static_cast<int>(sims.size());
  t.cols = static_cast<int>(sims.front().size());
  for (int i = 0; i < t.rows; ++i) {
    for (int j = 0; j < t.cols; ++j) {
      t.cells.push_back(Cell(static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(j), sims[i][j]));
    }
  }
  return t;
}

using PairSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

PairSet Pairs(const std::vector<MatchResult>& results) {
  PairSet s;
  for (const auto& r : results) s.emplace(r.ref_q.object_index, r.ref_c.object_index);
  return s;
}

TEST(GreedySelect, SingleCell) {
  const auto picks = GreedySelect(Table({{0.4}}));
  ASSERT_EQ(picks.size(), 1u);
  EXPECT_EQ(picks[0].similarity, 0.4);
}

TEST(GreedySelect, DiagonalExample) {
  const auto picks = GreedySelect(Table({{0.9, 0.8}, {0.7, 0.95}}));
  ASSERT_EQ(picks.size(), 2u);
  EXPECT_EQ(picks[0].ref_q.object_index, 1u);
  EXPECT_EQ(picks[0].ref_c.object_index, 1u);
  EXPECT_EQ(picks[1].ref_q.object_index, 0u);
  EXPECT_EQ(picks[1].ref_c.object_index, 0u);
}

TEST(GreedySelect, AntiDiagonalExample) {
  const auto picks = GreedySelect(Table({{0.9, 0.95}, {0.8, 0.7}}));
  ASSERT_EQ(picks.size(), 2u);
  EXPECT_EQ(picks[0].similarity, 0.95);
  EXPECT_EQ(picks[0].ref_q.object_index, 0u);
  EXPECT_EQ(picks[0].ref_c.object_index, 1u);
  EXPECT_EQ(picks[1].similarity, 0.8);
  EXPECT_EQ(picks[1].ref_q.object_index, 1u);
  EXPECT_EQ(picks[1].ref_c.object_index, 0u);
}

TEST(GreedySelect, TiesGoToSmallerIndices) {
  const auto picks = GreedySelect(Table({{0.5, 0.5}, {0.5, 0.5}}));
  ASSERT_EQ(picks.size(), 2u);
  EXPECT_EQ(Pairs(picks), (PairSet{{0, 0}, {1, 1}}));
  EXPECT_EQ(picks[0].ref_q.object_index, 0u);
}

TEST(GreedySelect, NoReuseAndMinLength) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(UniformIndex(rng, 7));
    const int n = 1 + static_cast<int>(UniformIndex(rng, 7));
    std::vector<std::vector<double>> sims(m, std::vector<double>(n));
    for (auto& row : sims) {
      for (auto& v : row) v = UniformReal(rng, 0, 1);
    }
    const auto picks = GreedySelect(Table(sims));
    EXPECT_EQ(picks.size(), static_cast<std::size_t>(std::min(m, n)));
    std::set<std::uint32_t> rows, cols;
    for (const auto& p : picks) {
      EXPECT_TRUE(rows.insert(p.ref_q.object_index).second);
      EXPECT_TRUE(cols.insert(p.ref_c.object_index).second);
    }
    for (std::size_t k = 1; k < picks.size(); ++k) {
      EXPECT_GE(picks[k - 1].similarity, picks[k].similarity);
    }
  }
}

TEST(GreedySelect, PermutationInvariant) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(UniformIndex(rng, 6));
    const int n = 1 + static_cast<int>(UniformIndex(rng, 6));
    std::vector<std::vector<double>> sims(m, std::vector<double>(n));
    for (auto& row : sims) {
      for (auto& v : row) v = 0.1 * static_cast<double>(UniformIndex(rng, 6));
    }
    const MatchTable table = Table(sims);
    std::vector<int> prow(m), pcol(n);
    for (int i = 0; i < m; ++i) prow[i] = i;
    for (int j = 0; j < n; ++j) pcol[j] = j;
    for (int i = m - 1; i > 0; --i) std::swap(prow[i], prow[UniformIndex(rng, i + 1)]);
    for (int j = n - 1; j > 0; --j) std::swap(pcol[j], pcol[UniformIndex(rng, j + 1)]);
    MatchTable shuffled;
    shuffled.rows = m;
    shuffled.cols = n;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) shuffled.cells.push_back(table.at(prow[i], pcol[j]));
    }
    EXPECT_EQ(Pairs(GreedySelect(shuffled)), Pairs(GreedySelect(table)));
  }
}

TEST(ThresholdFilter, Examples) {
  const std::vector<MatchResult> picks = {Cell(0, 0, 0.9), Cell(1, 1, 0.6)};
  EXPECT_EQ(ThresholdFilter(picks, 0.0).size(), 2u);
  EXPECT_TRUE(ThresholdFilter(picks, 1.0).empty());
  const auto kept = ThresholdFilter(picks, 0.75);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].similarity, 0.9);
  EXPECT_EQ(ThresholdFilter(std::vector<MatchResult>{Cell(0, 0, 0.75)}, 0.75).size(),
            1u);
}

TEST(ClusterPoseHypotheses, SingleHypothesis) {
  const std::vector<RelativePose> poses = {{1, 2, 0.3}};
  const PoseCluster c = ClusterPoseHypotheses(poses, {}, OscConfig{});
  EXPECT_TRUE(c.accepted);
  EXPECT_EQ(c.support, 1);
  EXPECT_DOUBLE_EQ(c.fused.dx, 1);
  EXPECT_DOUBLE_EQ(c.fused.dy, 2);
  EXPECT_DOUBLE_EQ(c.fused.dtheta, 0.3);
}

TEST(ClusterPoseHypotheses, IdenticalPoses) {
  const std::vector<RelativePose> poses(3, RelativePose{-4, 1, -2.5});
  const PoseCluster c = ClusterPoseHypotheses(poses, {}, OscConfig{});
  EXPECT_TRUE(c.accepted);
  EXPECT_EQ(c.support, 3);
  EXPECT_NEAR(c.fused.dx, -4, 1e-15);
  EXPECT_NEAR(c.fused.dtheta, -2.5, 1e-15);
}

TEST(ClusterPoseHypotheses, OutlierLeftOut) {
  const std::vector<RelativePose> poses = {{0, 0, 0}, {0.1, 0, 0}, {20, 20, 3}};
  const PoseCluster c = ClusterPoseHypotheses(poses, {}, OscConfig{});
  EXPECT_TRUE(c.accepted);
  EXPECT_EQ(c.support, 2);
  EXPECT_EQ(c.members, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(c.fused.dx, 0.05, 1e-15);
  EXPECT_NEAR(c.fused.dy, 0.0, 1e-15);
  EXPECT_NEAR(c.fused.dtheta, 0.0, 1e-15);
}

TEST(ClusterPoseHypotheses, AnglesAveragedAcrossTheSeam) {
  const std::vector<RelativePose> poses = {{0, 0, kPi - 0.02}, {0, 0, -kPi + 0.02}};
  const PoseCluster c = ClusterPoseHypotheses(poses, {}, OscConfig{});
  EXPECT_EQ(c.support, 2);
  EXPECT_NEAR(std::abs(c.fused.dtheta), kPi, 1e-12);
}

TEST(ClusterPoseHypotheses, TieGoesToMostSimilar) {
  const std::vector<RelativePose> poses = {{0, 0, 0}, {10, 0, 0}};
  const std::vector<double> sims = {0.8, 0.9};
  const PoseCluster c = ClusterPoseHypotheses(poses, sims, OscConfig{});
  EXPECT_EQ(c.members, (std::vector<std::size_t>{1}));
  EXPECT_DOUBLE_EQ(c.fused.dx, 10);
}

TEST(ClusterPoseHypotheses, RejectsScatteredHypotheses) {
  const std::vector<RelativePose> poses = {
      {0, 0, 0}, {5, 0, 0}, {10, 0, 0}, {15, 0, 0}};
  const PoseCluster c = ClusterPoseHypotheses(poses, {}, OscConfig{});
  EXPECT_EQ(c.support, 1);
  EXPECT_FALSE(c.accepted);  // needs ceil(4/3) = 2
  const std::vector<RelativePose> three(poses.begin(), poses.begin() + 3);
  EXPECT_TRUE(ClusterPoseHypotheses(three, {}, OscConfig{}).accepted);
}

TEST(ClusterPoseHypotheses, FusedInsideMemberBoundingBox) {
  Rng rng(7);
  const OscConfig config;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RelativePose> poses;
    const int n = 1 + static_cast<int>(UniformIndex(rng, 8));
    for (int i = 0; i < n; ++i) {
      poses.push_back({UniformReal(rng, -2, 2), UniformReal(rng, -2, 2),
                       UniformReal(rng, -kPi, kPi)});
    }
    const PoseCluster c = ClusterPoseHypotheses(poses, {}, config);
    ASSERT_FALSE(c.members.empty());
    const double ref = poses.front().dtheta;
    double lo[3] = {1e9, 1e9, 1e9}, hi[3] = {-1e9, -1e9, -1e9};
    for (const std::size_t i : c.members) {
      const double v[3] = {poses[i].dx, poses[i].dy,
                           ref + WrapAngle(poses[i].dtheta - ref)};
      for (int d = 0; d < 3; ++d) {
        lo[d] = std::min(lo[d], v[d]);
        hi[d] = std::max(hi[d], v[d]);
      }
    }
    const double fused_theta = ref + WrapAngle(c.fused.dtheta - ref);
    EXPECT_GE(c.fused.dx, lo[0] - 1e-12);
    EXPECT_LE(c.fused.dx, hi[0] + 1e-12);
    EXPECT_GE(c.fused.dy, lo[1] - 1e-12);
    EXPECT_LE(c.fused.dy, hi[1] + 1e-12);
    EXPECT_GE(fused_theta, lo[2] - 1e-12);
    EXPECT_LE(fused_theta, hi[2] + 1e-12);
  }
}

std::vector<ObjectScanContext> Describe(const SyntheticScene& scene,
                                        const PlanarPose& pose,
                                        std::uint32_t frame_id) {
  return DescribeFrame(ViewScene(scene, pose, frame_id), OscConfig{});
}

TEST(MatchFrames, IdenticalFrames) {
  const SyntheticScene scene = GenerateSyntheticScene(12, 4);
  const auto d = Describe(scene, {1, -2, 0.4}, 5);
  ASSERT_GE(d.size(), 3u);
  const PlaceMatch m = MatchFrames(d, d, OscConfig{});
  EXPECT_TRUE(m.accepted);
  EXPECT_EQ(m.similarity, 1.0);
  EXPECT_EQ(m.frame_q, 5u);
  EXPECT_EQ(m.frame_c, 5u);
  EXPECT_EQ(m.support, static_cast<int>(d.size()));
  EXPECT_NEAR(m.fused_pose.dx, 0.0, 1e-12);
  EXPECT_NEAR(m.fused_pose.dy, 0.0, 1e-12);
  EXPECT_NEAR(m.fused_pose.dtheta, 0.0, 1e-12);
}

TEST(MatchFrames, EmptySideRejected) {
  const SyntheticScene scene = GenerateSyntheticScene(12, 4);
  const auto d = Describe(scene, {}, 5);
  const PlaceMatch m = MatchFrames(d, {}, OscConfig{});
  EXPECT_FALSE(m.accepted);
  EXPECT_EQ(m.similarity, 0.0);
  EXPECT_TRUE(m.hypotheses.empty());
}

TEST(MatchFrames, SupportCountsSurvivingHypotheses) {
  Rng rng(9);
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const SyntheticScene scene = GenerateSyntheticScene(seed, 5);
    const PlanarPose b{UniformReal(rng, -8, 8), UniformReal(rng, -8, 8),
                       UniformReal(rng, -kPi, kPi)};
    const PlaceMatch m =
        MatchFrames(Describe(scene, {}, 0), Describe(scene, b, 1), OscConfig{});
    EXPECT_LE(m.support, static_cast<int>(m.hypotheses.size()));
    for (const auto& h : m.hypotheses) {
      EXPECT_GE(h.similarity, OscConfig{}.similarity_threshold);
      EXPECT_LE(h.similarity, m.similarity);
    }
  }
}

TEST(MatchFrames, DisjointScenesMostlyRejected) {
  const OscConfig config;
  int accepted = 0;
  for (std::uint64_t k = 0; k < 40; ++k) {
    const auto a = Describe(GenerateSyntheticScene(1000 + 2 * k, 4), {}, 0);
    const auto b = Describe(GenerateSyntheticScene(1001 + 2 * k, 4), {}, 1);
    accepted += MatchFrames(a, b, config).accepted ? 1 : 0;
  }
  EXPECT_LE(accepted, 2);
}

TEST(MatchFrames, RecoversViewTransformAndIsSymmetric) {
  const OscConfig config;
  const double bin = 2 * kPi / config.num_sectors;
  Rng rng(10);
  int checked = 0;
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const SyntheticScene scene = GenerateSyntheticScene(seed, 4);
    const PlanarPose va{UniformReal(rng, -1, 1), UniformReal(rng, -1, 1),
                        UniformReal(rng, -kPi, kPi)};
    const PlanarPose vb{va.x + UniformReal(rng, -5, 5), va.y + UniformReal(rng, -5, 5),
                        UniformReal(rng, -kPi, kPi)};
    const auto da = Describe(scene, va, 0);
    const auto db = Describe(scene, vb, 1);
    const PlaceMatch ab = MatchFrames(da, db, config);
    const PlaceMatch ba = MatchFrames(db, da, config);
    if (!ab.accepted) continue;
    ++checked;
    EXPECT_TRUE(ba.accepted);
    const PlanarPose truth = Between(va, vb);
    EXPECT_LE(std::abs(WrapAngle(ab.fused_pose.dtheta - truth.yaw)), bin);
    EXPECT_LE(std::hypot(ab.fused_pose.dx - truth.x, ab.fused_pose.dy - truth.y), 1.0);
    const RelativePose inv = Inverse(ab.fused_pose);
    EXPECT_LE(std::abs(WrapAngle(inv.dtheta - ba.fused_pose.dtheta)), bin);
    EXPECT_LE(std::hypot(inv.dx - ba.fused_pose.dx, inv.dy - ba.fused_pose.dy), 1.0);
  }
  EXPECT_GE(checked, 18);
}

}  // namespace
}  // namespace osc
