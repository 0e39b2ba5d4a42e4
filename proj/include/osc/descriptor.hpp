#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "osc/config.hpp"
#include "osc/dataset_io.hpp"
#include "osc/object_extraction.hpp"

namespace osc {

/// Polar grid of mean point heights centred on one Main Object.
///
/// Rows are rings (equal-width radial bands out to max_radius), columns are
/// sectors (equal angular wedges). Sector angles are measured counterclockwise
/// from the sensor-to-object bearing, so the grid does not depend on where
/// the sensor stood, only on the direction it viewed the object from.
struct ObjectScanContext {
  Eigen::MatrixXd matrix;      // num_rings x num_sectors
  Eigen::VectorXd ring_key;    // row means, length num_rings
  Eigen::VectorXd sector_key;  // column means, length num_sectors
  MainObject object;           // centre; its centroid is the observation

  int num_rings() const { return static_cast<int>(matrix.rows()); }
  int num_sectors() const { return static_cast<int>(matrix.cols()); }
};

/// Fills the keys of `osc` from its matrix.
void ComputeKeys(ObjectScanContext& osc);

/// Builds the descriptor of `object` from every point of `cloud` within
/// max_radius of it. Cell value is the mean of (z + height_offset) of the
/// points falling in it, 0 for empty cells.
ObjectScanContext BuildObjectScanContext(const PointCloud& cloud,
                                         const MainObject& object,
                                         const OscConfig& config);

/// One descriptor per object, in the given object order.
std::vector<ObjectScanContext> BuildFrameDescriptors(
    const PointCloud& cloud, const std::vector<MainObject>& objects,
    const OscConfig& config);

/// Circular left shift: output column j = input column (j + n) mod cols.
/// Negative n shifts right.
Eigen::MatrixXd RotateColumns(const Eigen::MatrixXd& matrix, int n);

/// Circular left shift of a vector: out[j] = in[(j + n) mod size].
Eigen::VectorXd RotateLeft(const Eigen::VectorXd& v, int n);

// Descriptor file format, version 1 (all little-endian):
//   char[4] magic "OSCD", uint32 version, uint32 count, then per descriptor:
//   uint32 frame_id, uint32 object_index, float64 x_o, float64 y_o,
//   uint64 point_count, uint32 num_rings, uint32 num_sectors,
//   float64[num_rings * num_sectors] matrix in row-major order.
// Keys are recomputed on read.
inline constexpr std::uint32_t kDescriptorFormatVersion = 1;

void WriteDescriptors(const std::filesystem::path& path,
                      const std::vector<ObjectScanContext>& descriptors);
std::vector<ObjectScanContext> ReadDescriptors(
    const std::filesystem::path& path);

}  // namespace osc
