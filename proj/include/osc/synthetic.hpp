#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "osc/dataset_io.hpp"

namespace osc {

// Class ids written by the generator (SemanticKITTI numbering).
inline constexpr std::uint16_t kPoleClass = 80;
inline constexpr std::uint16_t kBuildingClass = 50;
inline constexpr std::uint16_t kFenceClass = 51;
inline constexpr std::uint16_t kVegetationClass = 70;

/// World-frame labelled points plus where the poles were planted.
struct SyntheticScene {
  std::vector<Point> points;
  std::vector<std::uint16_t> labels;
  std::vector<Eigen::Vector2d> object_positions;
};

/// Pose of a sensor in the world plane: p_world = R(yaw) p_sensor + t.
struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

/// Planar change of frame, in double precision.
Eigen::Vector2d SensorFromWorld(const PlanarPose& sensor_pose,
                                const Eigen::Vector2d& world_point);
Eigen::Vector2d WorldFromSensor(const PlanarPose& sensor_pose,
                                const Eigen::Vector2d& sensor_point);

/// Vertical pole clusters (60-80 points each, 3-6 m tall) planted at least
/// 3 m and at most 14 m apart, surrounded by flat-topped clutter blocks out
/// to 25 m from the scene centre. `clutter_density` is blocks per 100 m^2.
/// Block heights follow a per-angular-region base level so the surroundings
/// of different poles look different. Deterministic in `seed`; throws
/// kPrecondition when num_objects < 1.
SyntheticScene GenerateSyntheticScene(std::uint64_t seed, int num_objects,
                                      double clutter_density = 1.5);

/// Expresses the scene in the frame of a sensor at `sensor_pose`. No
/// occlusion or range limit.
LabeledCloud ViewScene(const SyntheticScene& scene,
                       const PlanarPose& sensor_pose,
                       std::uint32_t frame_id = 0);

/// Planar pose of `b` as seen from `a` (the transform taking b-frame points
/// into the a frame).
PlanarPose Between(const PlanarPose& a, const PlanarPose& b);

/// A KITTI-like sequence built from independent places, each visited twice:
/// frames [0, P) visit places 0..P-1, frames [P, 2P) revisit them in the same
/// order with an offset of up to `max_revisit_offset` metres and arbitrary
/// yaw. Places sit `place_spacing` metres apart along the x axis, so only a
/// place's two visits are ever closer than the spacing.
struct SyntheticSequenceOptions {
  int num_places = 60;
  double place_spacing = 200.0;
  double max_revisit_offset = 8.0;
  int min_objects = 3;
  int max_objects = 6;
  double clutter_density = 1.5;
};

/// Poses are materialized; clouds are regenerated on demand from the
/// per-place seeds so long sequences stay cheap to hold.
class SyntheticSequence {
 public:
  struct Place {
    std::uint64_t scene_seed = 0;
    int num_objects = 0;
    PlanarPose first_visit;   // scene-local sensor poses
    PlanarPose second_visit;
  };

  SyntheticSequence(std::vector<Place> places, double clutter_density,
                    std::vector<FramePose> poses)
      : places_(std::move(places)),
        clutter_density_(clutter_density),
        poses_(std::move(poses)) {}

  /// LiDAR poses relative to frame 0, one per frame.
  const std::vector<FramePose>& poses() const { return poses_; }
  std::size_t size() const { return poses_.size(); }
  const std::vector<Place>& places() const { return places_; }

  LabeledCloud Frame(std::uint32_t frame_id) const;

 private:
  std::vector<Place> places_;
  double clutter_density_;
  std::vector<FramePose> poses_;
};

SyntheticSequence GenerateSyntheticSequence(
    std::uint64_t seed, const SyntheticSequenceOptions& options = {});

}  // namespace osc
