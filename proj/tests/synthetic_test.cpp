#include "osc/synthetic.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "osc/error.hpp"
#include "osc/object_extraction.hpp"
#include "osc/random.hpp"

namespace osc {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(GenerateSyntheticScene, RejectsZeroObjects) {
  EXPECT_THROW(GenerateSyntheticScene(1, 0), Error);
}

TEST(GenerateSyntheticScene, SameSeedSameScene) {
  const auto a = GenerateSyntheticScene(77, 5);
  const auto b = GenerateSyntheticScene(77, 5);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.object_positions, b.object_positions);
  EXPECT_NE(GenerateSyntheticScene(78, 5).points, a.points);
}

TEST(GenerateSyntheticScene, ObjectSpacing) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto scene = GenerateSyntheticScene(seed, 6);
    ASSERT_EQ(scene.object_positions.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        const double d = (scene.object_positions[i] - scene.object_positions[j]).norm();
        EXPECT_GE(d, 3.0);
        EXPECT_LE(d, 14.0);
      }
    }
  }
}

TEST(GenerateSyntheticScene, EachPoleIsOneMainObject) {
  const OscConfig config;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 1 + static_cast<int>(seed % 6);
    const auto scene = GenerateSyntheticScene(seed, n);
    // View from a point no pole can sit on.
    const auto view = ViewScene(scene, {30, 0, 0});
    const auto objects = ExtractMainObjects(view.cloud, view.labels, config);
    ASSERT_EQ(objects.size(), static_cast<std::size_t>(n)) << "seed " << seed;
    for (const auto& o : objects) {
      EXPECT_GE(o.point_count, static_cast<std::size_t>(config.cluster_min_points));
      double nearest = 1e9;
      for (const auto& p : scene.object_positions) {
        nearest = std::min(nearest, std::hypot(o.centroid_x + 30 - p.x(),
                                               o.centroid_y - p.y()));
      }
      EXPECT_LT(nearest, 0.05);
    }
  }
}

TEST(ViewScene, IdentityPose) {
  const auto scene = GenerateSyntheticScene(3, 3);
  const auto view = ViewScene(scene, {}, 4);
  EXPECT_EQ(view.cloud.frame_id, 4u);
  EXPECT_EQ(view.labels.frame_id, 4u);
  EXPECT_EQ(view.cloud.points, scene.points);
  EXPECT_EQ(view.labels.class_ids, scene.labels);
}

TEST(ViewScene, PureTranslation) {
  const auto scene = GenerateSyntheticScene(3, 3);
  const auto view = ViewScene(scene, {2.5, 0, 0});
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    EXPECT_NEAR(view.cloud.points[i].x, scene.points[i].x - 2.5, 1e-5);
    EXPECT_NEAR(view.cloud.points[i].y, scene.points[i].y, 1e-6);
    EXPECT_EQ(view.cloud.points[i].z, scene.points[i].z);
  }
}

TEST(ViewScene, FrameChangeRoundTrip) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const PlanarPose pose{UniformReal(rng, -100, 100), UniformReal(rng, -100, 100),
                          UniformReal(rng, -kPi, kPi)};
    const Eigen::Vector2d w(UniformReal(rng, -50, 50), UniformReal(rng, -50, 50));
    const Eigen::Vector2d back = WorldFromSensor(pose, SensorFromWorld(pose, w));
    EXPECT_LE((back - w).norm(), 1e-12);
  }
}

TEST(ViewScene, StoredCloudRoundTripsToSinglePrecision) {
  const auto scene = GenerateSyntheticScene(8, 4);
  const PlanarPose pose{3, -4, 1.1};
  const auto view = ViewScene(scene, pose);
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Eigen::Vector2d w = WorldFromSensor(
        pose, {view.cloud.points[i].x, view.cloud.points[i].y});
    EXPECT_NEAR(w.x(), scene.points[i].x, 1e-5);
    EXPECT_NEAR(w.y(), scene.points[i].y, 1e-5);
  }
}

TEST(Between, ComposesWithWorldFromSensor) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const PlanarPose a{UniformReal(rng, -10, 10), UniformReal(rng, -10, 10),
                       UniformReal(rng, -kPi, kPi)};
    const PlanarPose b{UniformReal(rng, -10, 10), UniformReal(rng, -10, 10),
                       UniformReal(rng, -kPi, kPi)};
    const PlanarPose ab = Between(a, b);
    const Eigen::Vector2d p(UniformReal(rng, -5, 5), UniformReal(rng, -5, 5));
    const Eigen::Vector2d via_a = WorldFromSensor(a, WorldFromSensor(ab, p));
    EXPECT_LE((via_a - WorldFromSensor(b, p)).norm(), 1e-12);
  }
}

TEST(GenerateSyntheticSequence, Layout) {
  SyntheticSequenceOptions opts;
  opts.num_places = 5;
  const auto seq = GenerateSyntheticSequence(4, opts);
  ASSERT_EQ(seq.size(), 10u);
  EXPECT_TRUE(seq.poses()[0].rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-15));
  EXPECT_LE(seq.poses()[0].translation.norm(), 1e-12);
  for (std::uint32_t p = 0; p < 5; ++p) {
    const double revisit =
        (seq.poses()[p].translation - seq.poses()[p + 5].translation).norm();
    EXPECT_LE(revisit, opts.max_revisit_offset + 1e-9);
    for (std::uint32_t q = 0; q < 10; ++q) {
      if (q == p || q == p + 5) continue;
      EXPECT_GT((seq.poses()[p].translation - seq.poses()[q].translation).norm(), 100.0);
    }
  }
  EXPECT_THROW(seq.Frame(10), Error);
}

TEST(GenerateSyntheticSequence, FramesRegenerateIdentically) {
  SyntheticSequenceOptions opts;
  opts.num_places = 3;
  const auto a = GenerateSyntheticSequence(9, opts);
  const auto b = GenerateSyntheticSequence(9, opts);
  for (std::uint32_t id = 0; id < 6; ++id) {
    const auto fa = a.Frame(id);
    EXPECT_EQ(fa.cloud.frame_id, id);
    EXPECT_EQ(fa.cloud.points, b.Frame(id).cloud.points);
    EXPECT_EQ(fa.cloud.points, a.Frame(id).cloud.points);
  }
}

}  // namespace
}  // namespace osc
