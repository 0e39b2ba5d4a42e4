#include "osc/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "osc/error.hpp"
#include "osc/pose.hpp"
#include "osc/random.hpp"

namespace osc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGroundZ = -1.73;  // HDL-64E mounting height on KITTI
constexpr double kObjectDiscRadius = 7.0;
constexpr double kMinObjectSpacing = 3.0;
constexpr double kClutterRadius = 25.0;
constexpr int kHeightRegions = 8;
constexpr double kTopPointsPerSquareMetre = 25.0;

Eigen::Vector2d UniformInDisc(Rng& rng, double radius) {
  const double r = radius * std::sqrt(UniformReal(rng, 0.0, 1.0));
  const double a = UniformReal(rng, -kPi, kPi);
  return {r * std::cos(a), r * std::sin(a)};
}

FramePose ToFramePose(const PlanarPose& p, std::uint32_t frame_id) {
  FramePose pose;
  pose.frame_id = frame_id;
  pose.rotation = Eigen::AngleAxisd(p.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  pose.translation = {p.x, p.y, 0.0};
  return pose;
}

}  // namespace

Eigen::Vector2d SensorFromWorld(const PlanarPose& sensor_pose,
                                const Eigen::Vector2d& world_point) {
  const double c = std::cos(sensor_pose.yaw), s = std::sin(sensor_pose.yaw);
  const double dx = world_point.x() - sensor_pose.x;
  const double dy = world_point.y() - sensor_pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Eigen::Vector2d WorldFromSensor(const PlanarPose& sensor_pose,
                                const Eigen::Vector2d& sensor_point) {
  const double c = std::cos(sensor_pose.yaw), s = std::sin(sensor_pose.yaw);
  return {sensor_pose.x + c * sensor_point.x() - s * sensor_point.y(),
          sensor_pose.y + s * sensor_point.x() + c * sensor_point.y()};
}

SyntheticScene GenerateSyntheticScene(std::uint64_t seed, int num_objects,
                                      double clutter_density) {
  if (num_objects < 1) {
    throw Error(ErrorCategory::kPrecondition,
                "synthetic scene needs at least one object");
  }
  Rng rng(seed);
  SyntheticScene scene;

  // Pole sites: pairwise >= 3 m inside a 7 m disc, hence also <= 14 m apart.
  int attempts = 0;
  while (static_cast<int>(scene.object_positions.size()) < num_objects) {
    if (++attempts > 100000) {
      throw Error(ErrorCategory::kPrecondition,
                  "cannot place " + std::to_string(num_objects) +
                      " objects 3 m apart");
    }
    const Eigen::Vector2d site = UniformInDisc(rng, kObjectDiscRadius);
    const bool clear = std::all_of(
        scene.object_positions.begin(), scene.object_positions.end(),
        [&](const Eigen::Vector2d& o) { return (o - site).norm() >= kMinObjectSpacing; });
    if (clear) scene.object_positions.push_back(site);
  }

  for (const auto& site : scene.object_positions) {
    const double height = UniformReal(rng, 3.0, 6.0);
    const int count = 60 + static_cast<int>(UniformIndex(rng, 21));
    for (int k = 0; k < count; ++k) {
      const Eigen::Vector2d jitter = UniformInDisc(rng, 0.12);
      Point p;
      p.x = static_cast<float>(site.x() + jitter.x());
      p.y = static_cast<float>(site.y() + jitter.y());
      p.z = static_cast<float>(kGroundZ + height * k / (count - 1));
      p.intensity = 0.5f;
      scene.points.push_back(p);
      scene.labels.push_back(kPoleClass);
    }
  }

  std::array<double, kHeightRegions> region_height;
  for (auto& h : region_height) h = UniformReal(rng, 0.5, 4.5);
  constexpr std::array<std::uint16_t, 3> kClutterClasses = {
      kBuildingClass, kFenceClass, kVegetationClass};

  const auto blocks = static_cast<int>(
      std::lround(clutter_density * kPi * kClutterRadius * kClutterRadius / 100.0));
  for (int b = 0; b < blocks; ++b) {
    const Eigen::Vector2d centre = UniformInDisc(rng, kClutterRadius);
    const double footprint = UniformReal(rng, 0.6, 2.0);
    const double bearing = std::atan2(centre.y(), centre.x()) + kPi;
    const int region =
        std::min(static_cast<int>(bearing / (2.0 * kPi) * kHeightRegions),
                 kHeightRegions - 1);
    const double top = std::clamp(
        region_height[static_cast<std::size_t>(region)] * UniformReal(rng, 0.7, 1.3),
        0.3, 6.0);
    const std::uint16_t label = kClutterClasses[UniformIndex(rng, kClutterClasses.size())];
    const auto count = static_cast<int>(
        std::ceil(kTopPointsPerSquareMetre * kPi * footprint * footprint));
    for (int k = 0; k < count; ++k) {
      const Eigen::Vector2d offset = UniformInDisc(rng, footprint);
      Point p;
      p.x = static_cast<float>(centre.x() + offset.x());
      p.y = static_cast<float>(centre.y() + offset.y());
      p.z = static_cast<float>(kGroundZ + top);
      p.intensity = 0.2f;
      scene.points.push_back(p);
      scene.labels.push_back(label);
    }
  }
  return scene;
}

LabeledCloud ViewScene(const SyntheticScene& scene,
                       const PlanarPose& sensor_pose, std::uint32_t frame_id) {
  LabeledCloud view;
  view.cloud.frame_id = frame_id;
  view.labels.frame_id = frame_id;
  view.cloud.points.reserve(scene.points.size());
  for (const Point& p : scene.points) {
    const Eigen::Vector2d s = SensorFromWorld(sensor_pose, {p.x, p.y});
    view.cloud.points.push_back(
        {static_cast<float>(s.x()), static_cast<float>(s.y()), p.z, p.intensity});
  }
  view.labels.class_ids = scene.labels;
  return view;
}

PlanarPose Between(const PlanarPose& a, const PlanarPose& b) {
  const Eigen::Vector2d t = SensorFromWorld(a, {b.x, b.y});
  return {t.x(), t.y(), WrapAngle(b.yaw - a.yaw)};
}

SyntheticSequence GenerateSyntheticSequence(
    std::uint64_t seed, const SyntheticSequenceOptions& options) {
  if (options.num_places < 1 || options.min_objects < 1 ||
      options.max_objects < options.min_objects) {
    throw Error(ErrorCategory::kPrecondition, "invalid synthetic sequence options");
  }
  Rng rng(seed);
  const auto count = static_cast<std::size_t>(options.num_places);
  std::vector<SyntheticSequence::Place> places(count);
  std::vector<PlanarPose> world(2 * count);

  for (std::size_t p = 0; p < count; ++p) {
    auto& place = places[p];
    place.scene_seed = rng();
    place.num_objects =
        options.min_objects +
        static_cast<int>(UniformIndex(
            rng, static_cast<std::uint64_t>(options.max_objects - options.min_objects + 1)));

    const Eigen::Vector2d start = UniformInDisc(rng, 2.0);
    place.first_visit = {start.x(), start.y(), UniformReal(rng, -kPi, kPi)};
    const double heading = UniformReal(rng, -kPi, kPi);
    const double offset = UniformReal(rng, 0.0, options.max_revisit_offset);
    const Eigen::Vector2d revisit = WorldFromSensor(
        place.first_visit, {offset * std::cos(heading), offset * std::sin(heading)});
    place.second_visit = {revisit.x(), revisit.y(),
                          WrapAngle(place.first_visit.yaw + UniformReal(rng, -kPi, kPi))};

    const double place_x = options.place_spacing * static_cast<double>(p);
    const auto& a = place.first_visit;
    const auto& b = place.second_visit;
    world[p] = {place_x + a.x, a.y, a.yaw};
    world[p + count] = {place_x + b.x, b.y, b.yaw};
  }

  // Express every pose relative to frame 0, as KITTI ground truth does.
  std::vector<FramePose> poses;
  for (std::size_t i = 0; i < world.size(); ++i) {
    poses.push_back(ToFramePose(Between(world.front(), world[i]),
                                static_cast<std::uint32_t>(i)));
  }
  return SyntheticSequence(std::move(places), options.clutter_density,
                           std::move(poses));
}

LabeledCloud SyntheticSequence::Frame(std::uint32_t frame_id) const {
  if (frame_id >= poses_.size()) {
    throw Error(ErrorCategory::kPrecondition,
                "synthetic frame " + std::to_string(frame_id) + " out of range");
  }
  const std::size_t p = frame_id % places_.size();
  const Place& place = places_[p];
  const SyntheticScene scene =
      GenerateSyntheticScene(place.scene_seed, place.num_objects, clutter_density_);
  return ViewScene(scene, frame_id < places_.size() ? place.first_visit : place.second_visit,
                   frame_id);
}

}  // namespace osc
