#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace osc {

/// Every tunable of the pipeline. Immutable after Validate(); share freely.
struct OscConfig {
  int num_rings = 20;
  int num_sectors = 60;
  double max_radius = 16.0;        // m
  double min_object_range = 1.0;   // m
  double height_offset = 2.0;      // m, added to every grid feature
  std::set<std::uint16_t> main_object_classes = {80};  // SemanticKITTI "pole"
  double cluster_tolerance = 0.5;  // m
  int cluster_min_points = 40;
  int knn_candidates = 10;
  int shift_window_halfwidth = 3;
  double similarity_threshold = 0.75;
  double pose_cluster_tolerance = 1.0;  // m, in the scaled pose space
  double pose_angle_scale = 5.0;        // m per rad
  double pose_min_cluster_fraction = 1.0 / 3.0;
  double positive_distance = 10.0;  // m
  int min_frame_gap = 50;           // frames

  bool operator==(const OscConfig&) const = default;
};

/// Returns `config` unchanged when every invariant holds, otherwise throws
/// osc::Error (kConfig) naming the offending field.
OscConfig Validate(const OscConfig& config);

/// Names of all fields, in declaration order. These are also the config file
/// keys and the CLI flag names.
const std::vector<std::string>& ConfigKeys();

/// Parses `value` into the field named `key`. Lists (main_object_classes) are
/// comma separated. Throws kConfig on an unknown key or unparsable value.
void SetConfigValue(OscConfig& config, std::string_view key,
                    std::string_view value);

/// Flat key-value format: one `key = value` per line, `#` starts a comment,
/// blank lines ignored. Keys not present keep their defaults. The result is
/// not validated.
OscConfig ParseConfig(std::string_view text, OscConfig base = {});
OscConfig LoadConfigFile(const std::filesystem::path& path,
                         OscConfig base = {});

/// Inverse of ParseConfig; round-trips every field exactly.
std::string FormatConfig(const OscConfig& config);

}  // namespace osc
