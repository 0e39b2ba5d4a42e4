#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace osc {

struct Point {
  float x = 0.f;
  float y = 0.f;
  float z = 0.f;
  float intensity = 0.f;

  bool operator==(const Point&) const = default;
};

/// One LiDAR sweep in the sensor frame (sensor at the origin).
struct PointCloud {
  std::uint32_t frame_id = 0;
  std::vector<Point> points;
};

/// Per-point semantic class ids, parallel to PointCloud::points.
struct SemanticLabels {
  std::uint32_t frame_id = 0;
  std::vector<std::uint16_t> class_ids;
};

/// Sensor pose of one frame, expressed in the LiDAR frame of frame 0.
struct FramePose {
  std::uint32_t frame_id = 0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

// KITTI .bin: consecutive little-endian float32 quadruples (x, y, z, i).
PointCloud ReadPointCloud(const std::filesystem::path& path,
                          std::uint32_t frame_id = 0);
void WritePointCloud(const std::filesystem::path& path,
                     const PointCloud& cloud);

// SemanticKITTI .label: little-endian uint32 per point, the low 16 bits hold
// the class id and the high 16 bits the instance id (dropped here).
SemanticLabels ReadLabels(const std::filesystem::path& path,
                          std::size_t expected_count,
                          std::uint32_t frame_id = 0);
void WriteLabels(const std::filesystem::path& path,
                 const SemanticLabels& labels);

/// Reads the 12-float "Tr:" entry of a KITTI calib.txt as a 4x4 transform
/// mapping LiDAR coordinates into the camera frame.
Eigen::Matrix4d ReadCalibration(const std::filesystem::path& calib_path);

/// Reads KITTI camera-frame poses (3x4 row-major per line) and converts each
/// to the LiDAR frame: T_lidar = Tr^-1 * T_cam * Tr.
std::vector<FramePose> ReadPoses(const std::filesystem::path& poses_path,
                                 const std::filesystem::path& calib_path);

/// Writes camera-frame poses such that ReadPoses() with the same `tr`
/// returns `poses`.
void WritePoses(const std::filesystem::path& poses_path,
                const std::vector<FramePose>& poses,
                const Eigen::Matrix4d& tr);
void WriteCalibration(const std::filesystem::path& calib_path,
                      const Eigen::Matrix4d& tr);

/// Frame files of a KITTI-layout sequence directory.
struct SequenceLayout {
  std::filesystem::path root;
  std::vector<std::uint32_t> frame_ids;  // sorted, from velodyne/NNNNNN.bin

  std::filesystem::path VelodynePath(std::uint32_t frame_id) const;
  std::filesystem::path LabelPath(std::uint32_t frame_id) const;
  std::filesystem::path PosesPath() const { return root / "poses.txt"; }
  std::filesystem::path CalibPath() const { return root / "calib.txt"; }
};

/// Checks velodyne/, labels/, poses.txt and calib.txt. Throws kIo listing
/// every missing component. Poses are only required when `require_poses`.
SequenceLayout OpenSequence(const std::filesystem::path& root,
                            bool require_poses = true);

/// Loads the cloud and labels of one frame from a sequence.
struct LabeledCloud {
  PointCloud cloud;
  SemanticLabels labels;
};
LabeledCloud LoadFrame(const SequenceLayout& layout, std::uint32_t frame_id);

/// Decimal formatting used by every CSV the artifact writes.
std::string FormatCsvNumber(double value);

/// Zero-padded six digit frame name ("000042").
std::string FrameName(std::uint32_t frame_id);

}  // namespace osc
