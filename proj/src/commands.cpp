#include "osc/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>

#include <json.hpp>

#include "osc/dataset_io.hpp"
#include "osc/descriptor.hpp"
#include "osc/error.hpp"
#include "osc/matching.hpp"
#include "osc/object_extraction.hpp"

namespace osc {

namespace fs = std::filesystem;

namespace {

std::ofstream OpenCsv(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + path.string());
  return out;
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCategory::kIo,
                "cannot create " + dir.string() + ": " + ec.message());
  }
}

std::string NowUtc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void Begin(RunManifest& manifest, const std::string& command,
           const fs::path& out_dir, const OscConfig& config,
           std::vector<std::string> inputs) {
  EnsureDir(out_dir);
  if (manifest.command.empty()) manifest.command = command;
  manifest.config = config;
  manifest.output_dir = out_dir;
  manifest.inputs = std::move(inputs);
  if (manifest.started_at.empty()) manifest.started_at = NowUtc();
  WriteManifest(manifest);
}

const char* Bool(bool b) { return b ? "1" : "0"; }

std::string N(double v) { return FormatCsvNumber(v); }

}  // namespace

void WriteManifest(const RunManifest& manifest) {
  nlohmann::ordered_json config;
  // Round-trip through the flat format so the manifest holds exactly what a
  // config file would.
  const std::string flat = FormatConfig(manifest.config);
  std::size_t pos = 0;
  while (pos < flat.size()) {
    const auto end = flat.find('\n', pos);
    const std::string line = flat.substr(pos, end - pos);
    const auto eq = line.find(" = ");
    config[line.substr(0, eq)] = line.substr(eq + 3);
    pos = end + 1;
  }
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  j["argv"] = manifest.argv;
  j["config"] = config;
  j["inputs"] = manifest.inputs;
  j["output_dir"] = manifest.output_dir.string();
  j["seed"] = manifest.seed;
  j["started_at"] = manifest.started_at;
  std::ofstream out(manifest.output_dir / "manifest.json", std::ios::trunc);
  if (!out) {
    throw Error(ErrorCategory::kIo,
                "cannot write manifest in " + manifest.output_dir.string());
  }
  out << j.dump(2) << '\n';
}

void WriteObjectsCsv(const fs::path& path,
                     const std::vector<MainObject>& objects) {
  auto out = OpenCsv(path);
  out << "frame_id,object_index,centroid_x,centroid_y,point_count\n";
  for (const auto& o : objects) {
    out << o.frame_id << ',' << o.object_index << ',' << N(o.centroid_x) << ','
        << N(o.centroid_y) << ',' << o.point_count << '\n';
  }
}

void WritePlaceMatchesCsv(const fs::path& path,
                          const std::vector<PlaceMatch>& matches) {
  auto out = OpenCsv(path);
  out << "frame_q,frame_c,accepted,similarity,dx,dy,dtheta,support\n";
  for (const auto& m : matches) {
    out << m.frame_q << ',' << m.frame_c << ',' << Bool(m.accepted) << ','
        << N(m.similarity) << ',' << N(m.fused_pose.dx) << ','
        << N(m.fused_pose.dy) << ',' << N(m.fused_pose.dtheta) << ','
        << m.support << '\n';
  }
}

void WritePairMatchesCsv(const fs::path& path,
                         const std::vector<MatchResult>& results) {
  auto out = OpenCsv(path);
  out << "frame_q,obj_q,frame_c,obj_c,n,similarity\n";
  for (const auto& r : results) {
    out << r.ref_q.frame_id << ',' << r.ref_q.object_index << ','
        << r.ref_c.frame_id << ',' << r.ref_c.object_index << ',' << r.offset
        << ',' << N(r.similarity) << '\n';
  }
}

void WritePrCurveCsv(const fs::path& path, const std::vector<PrPoint>& curve) {
  auto out = OpenCsv(path);
  out << "threshold,precision,recall\n";
  for (const auto& p : curve) {
    out << N(p.threshold) << ',' << N(p.precision) << ',' << N(p.recall) << '\n';
  }
}

void WriteSummaryCsv(const fs::path& path, const EvaluationSummary& s) {
  auto out = OpenCsv(path);
  out << "f1_max,num_positive,num_negative,accepted_positive,accepted_negative,"
         "mean_trans_err,median_trans_err,mean_rot_err,median_rot_err\n";
  out << N(s.f1_max) << ',' << s.num_positive << ',' << s.num_negative << ','
      << s.accepted_positive << ',' << s.accepted_negative << ','
      << N(s.mean_translation_error) << ',' << N(s.median_translation_error)
      << ',' << N(s.mean_rotation_error) << ',' << N(s.median_rotation_error)
      << '\n';
}

void WriteLabeledPairsCsv(const fs::path& path,
                          const std::vector<LabeledPair>& pairs) {
  auto out = OpenCsv(path);
  out << "frame_a,frame_b,is_positive,distance,gt_dx,gt_dy,gt_dtheta\n";
  for (const auto& p : pairs) {
    out << p.frame_a << ',' << p.frame_b << ',' << Bool(p.is_positive) << ','
        << N(p.distance) << ',' << N(p.gt_pose.dx) << ',' << N(p.gt_pose.dy)
        << ',' << N(p.gt_pose.dtheta) << '\n';
  }
}

std::vector<ObjectScanContext> DescribeFrame(const LabeledCloud& frame,
                                             const OscConfig& config) {
  const auto objects = ExtractMainObjects(frame.cloud, frame.labels, config);
  return BuildFrameDescriptors(frame.cloud, objects, config);
}

void CmdExtract(const fs::path& dataset_dir, const fs::path& out_dir,
                const OscConfig& config, RunManifest manifest) {
  const SequenceLayout layout = OpenSequence(dataset_dir);
  Begin(manifest, "extract", out_dir, config, {dataset_dir.string()});
  EnsureDir(out_dir / "objects");
  for (const auto id : layout.frame_ids) {
    const LabeledCloud frame = LoadFrame(layout, id);
    WriteObjectsCsv(out_dir / "objects" / (FrameName(id) + ".csv"),
                    ExtractMainObjects(frame.cloud, frame.labels, config));
  }
}

void CmdDescribe(const fs::path& dataset_dir, const fs::path& out_dir,
                 const OscConfig& config, RunManifest manifest) {
  const SequenceLayout layout = OpenSequence(dataset_dir);
  Begin(manifest, "describe", out_dir, config, {dataset_dir.string()});
  EnsureDir(out_dir / "descriptors");
  for (const auto id : layout.frame_ids) {
    WriteDescriptors(out_dir / "descriptors" / (FrameName(id) + ".oscd"),
                     DescribeFrame(LoadFrame(layout, id), config));
  }
}

void CmdMatch(const fs::path& input_dir, const fs::path& out_dir,
              const OscConfig& config, RunManifest manifest) {
  // Either a describe output (descriptors/ or the directory of .oscd files
  // itself) or a KITTI-layout sequence.
  std::map<std::uint32_t, fs::path> descriptor_files;
  for (const fs::path& dir : {input_dir / "descriptors", input_dir}) {
    if (!fs::is_directory(dir)) continue;
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string stem = e.path().stem().string();
      if (e.path().extension() != ".oscd" || stem.empty() ||
          stem.find_first_not_of("0123456789") != std::string::npos) {
        continue;
      }
      descriptor_files[static_cast<std::uint32_t>(std::stoul(stem))] = e.path();
    }
    if (!descriptor_files.empty()) break;
  }
  std::optional<SequenceLayout> layout;
  if (descriptor_files.empty()) layout = OpenSequence(input_dir, false);
  Begin(manifest, "match", out_dir, config, {input_dir.string()});

  std::vector<std::uint32_t> frame_ids;
  if (layout) {
    frame_ids = layout->frame_ids;
  } else {
    for (const auto& [id, path] : descriptor_files) frame_ids.push_back(id);
  }
  auto load = [&](std::uint32_t id) {
    if (layout) return DescribeFrame(LoadFrame(*layout, id), config);
    auto d = ReadDescriptors(descriptor_files.at(id));
    for (const auto& osc : d) {
      if (osc.num_rings() != config.num_rings ||
          osc.num_sectors() != config.num_sectors) {
        throw Error(ErrorCategory::kConfig,
                    "descriptors of frame " + FrameName(id) +
                        " do not match num_rings/num_sectors");
      }
    }
    return d;
  };

  DescriptorIndex index(config.num_rings);
  std::map<std::uint32_t, std::vector<ObjectScanContext>> history;
  std::vector<PlaceMatch> closures;
  std::vector<MatchResult> pair_results;
  const auto gap = static_cast<std::size_t>(config.min_frame_gap);
  for (std::size_t k = 0; k < frame_ids.size(); ++k) {
    const std::uint32_t id = frame_ids[k];
    history[id] = load(id);
    if (k >= gap) {
      for (const auto& osc : history[frame_ids[k - gap]]) index.Insert(osc);
    }
    const auto& current = history[id];
    const auto candidates = QueryCandidateFrames(
        index, current, config.knn_candidates, [&](std::uint32_t f) {
          return (f > id ? f - id : id - f) < gap;
        });
    std::optional<PlaceMatch> best;
    for (const auto cand : candidates) {
      const auto& older = history.at(cand);
      const MatchTable table = BuildMatchTable(older, current, config);
      pair_results.insert(pair_results.end(), table.cells.begin(),
                          table.cells.end());
      PlaceMatch m = MatchFrames(older, current, config);
      m.frame_q = cand;
      m.frame_c = id;
      const auto rank = [](const PlaceMatch& p) {
        return std::pair{p.accepted, p.similarity};
      };
      if (!best || rank(m) > rank(*best)) best = std::move(m);
    }
    if (best) closures.push_back(std::move(*best));
  }
  WritePlaceMatchesCsv(out_dir / "loop_closures.csv", closures);
  WritePairMatchesCsv(out_dir / "pair_matches.csv", pair_results);
}

EvaluationReport CmdEvaluate(const EvaluateOptions& options,
                             const fs::path& out_dir, const OscConfig& config,
                             RunManifest manifest) {
  manifest.seed = options.seed;
  std::vector<FramePose> poses;
  DescriptorSource source;
  std::optional<SequenceLayout> layout;
  std::optional<SyntheticSequence> synthetic;
  if (options.synthetic) {
    synthetic = GenerateSyntheticSequence(options.seed, options.synthetic_options);
    poses = synthetic->poses();
    source = [&](std::uint32_t id) {
      return DescribeFrame(synthetic->Frame(id), config);
    };
    Begin(manifest, "evaluate", out_dir, config, {"synthetic"});
  } else {
    layout = OpenSequence(options.dataset_dir);
    const auto all = ReadPoses(layout->PosesPath(), layout->CalibPath());
    // Frames without a scan are dropped; KITTI pose line i is frame i.
    std::size_t k = 0;
    for (const auto& pose : all) {
      while (k < layout->frame_ids.size() && layout->frame_ids[k] < pose.frame_id) ++k;
      if (k < layout->frame_ids.size() && layout->frame_ids[k] == pose.frame_id) {
        poses.push_back(pose);
      }
    }
    source = [&](std::uint32_t id) {
      return DescribeFrame(LoadFrame(*layout, id), config);
    };
    Begin(manifest, "evaluate", out_dir, config, {options.dataset_dir.string()});
  }

  auto pairs = SamplePairs(poses, config, options.num_positive,
                           options.num_negative, options.seed);
  EvaluationReport report = Evaluate(std::move(pairs), source, config);
  WriteLabeledPairsCsv(out_dir / "labeled_pairs.csv", report.pairs);
  WritePlaceMatchesCsv(out_dir / "place_matches.csv", report.matches);
  WritePrCurveCsv(out_dir / "pr_curve.csv", report.curve);
  WriteSummaryCsv(out_dir / "summary.csv", report.summary);
  return report;
}

Eigen::Matrix4d DefaultLidarToCamera() {
  Eigen::Matrix4d tr = Eigen::Matrix4d::Identity();
  tr << 4.276802385584e-04, -9.999672484946e-01, -8.084491683471e-03,
      -1.198459927713e-02, -7.210626507497e-03, 8.081198471645e-03,
      -9.999413164504e-01, -5.403984729748e-02, 9.999738645903e-01,
      4.859485810390e-04, -7.206933692422e-03, -2.921968648686e-01, 0, 0, 0, 1;
  return tr;
}

void CmdSynthetic(const fs::path& out_dir, std::uint64_t seed,
                  const SyntheticSequenceOptions& options,
                  RunManifest manifest) {
  manifest.seed = seed;
  Begin(manifest, "synthetic", out_dir, manifest.config, {});
  const SyntheticSequence seq = GenerateSyntheticSequence(seed, options);
  EnsureDir(out_dir / "velodyne");
  EnsureDir(out_dir / "labels");
  SequenceLayout layout;
  layout.root = out_dir;
  for (std::uint32_t id = 0; id < seq.size(); ++id) {
    const LabeledCloud frame = seq.Frame(id);
    WritePointCloud(layout.VelodynePath(id), frame.cloud);
    WriteLabels(layout.LabelPath(id), frame.labels);
  }
  const Eigen::Matrix4d tr = DefaultLidarToCamera();
  WriteCalibration(layout.CalibPath(), tr);
  WritePoses(layout.PosesPath(), seq.poses(), tr);
}

}  // namespace osc
