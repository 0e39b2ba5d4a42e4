#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "osc/config.hpp"
#include "osc/evaluation.hpp"
#include "osc/filtering.hpp"
#include "osc/synthetic.hpp"

namespace osc {

/// What was run, with what, and where the results went. Written to
/// <out>/manifest.json before any other output.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  OscConfig config;
  std::vector<std::string> inputs;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::string started_at;  // UTC, ISO 8601
};

void WriteManifest(const RunManifest& manifest);

// CSV writers shared by the commands.
void WriteObjectsCsv(const std::filesystem::path& path,
                     const std::vector<MainObject>& objects);
void WritePlaceMatchesCsv(const std::filesystem::path& path,
                          const std::vector<PlaceMatch>& matches);
void WritePairMatchesCsv(const std::filesystem::path& path,
                         const std::vector<MatchResult>& results);
void WritePrCurveCsv(const std::filesystem::path& path,
                     const std::vector<PrPoint>& curve);
void WriteSummaryCsv(const std::filesystem::path& path,
                     const EvaluationSummary& summary);
void WriteLabeledPairsCsv(const std::filesystem::path& path,
                          const std::vector<LabeledPair>& pairs);

/// Main Object descriptors of one loaded frame.
std::vector<ObjectScanContext> DescribeFrame(const LabeledCloud& frame,
                                             const OscConfig& config);

/// objects/NNNNNN.csv for every frame of a KITTI-layout sequence.
void CmdExtract(const std::filesystem::path& dataset_dir,
                const std::filesystem::path& out_dir, const OscConfig& config,
                RunManifest manifest = {});

/// descriptors/NNNNNN.oscd for every frame.
void CmdDescribe(const std::filesystem::path& dataset_dir,
                 const std::filesystem::path& out_dir, const OscConfig& config,
                 RunManifest manifest = {});

/// Online loop detection over a directory of .oscd files (as written by
/// CmdDescribe) or over a dataset. A frame enters the RingKey index once it is
/// min_frame_gap frames old; each new frame queries it, matches every
/// candidate frame and reports the best one. Writes loop_closures.csv
/// (PlaceMatch schema, one row per frame that had candidates) and
/// pair_matches.csv (every descriptor pair evaluated).
void CmdMatch(const std::filesystem::path& input_dir,
              const std::filesystem::path& out_dir, const OscConfig& config,
              RunManifest manifest = {});

struct EvaluateOptions {
  std::filesystem::path dataset_dir;  // ignored in synthetic mode
  bool synthetic = false;
  std::uint64_t seed = 0;
  std::size_t num_positive = 2000;
  std::size_t num_negative = 2000;
  SyntheticSequenceOptions synthetic_options;
};

/// Samples labelled pairs, runs the frame-pair pipeline on each, and writes
/// labeled_pairs.csv, place_matches.csv, pr_curve.csv and summary.csv.
EvaluationReport CmdEvaluate(const EvaluateOptions& options,
                             const std::filesystem::path& out_dir,
                             const OscConfig& config, RunManifest manifest = {});

/// Writes a synthetic sequence in KITTI layout (velodyne/, labels/,
/// poses.txt, calib.txt) so every other command can consume it.
void CmdSynthetic(const std::filesystem::path& out_dir, std::uint64_t seed,
                  const SyntheticSequenceOptions& options,
                  RunManifest manifest = {});

/// KITTI's sequence-00 LiDAR-to-camera extrinsic, used for synthetic output.
Eigen::Matrix4d DefaultLidarToCamera();

}  // namespace osc
