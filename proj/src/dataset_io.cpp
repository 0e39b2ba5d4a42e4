#include "osc/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <Eigen/Dense>

#include "osc/error.hpp"

namespace osc {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteBytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCategory::kIo, "write failed for " + path.string());
}

std::uint32_t LoadU32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

void StoreU32(std::uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

float LoadF32(const unsigned char* p) {
  return std::bit_cast<float>(LoadU32(p));
}

void StoreF32(float v, unsigned char* p) {
  StoreU32(std::bit_cast<std::uint32_t>(v), p);
}

// Parses exactly `count` doubles from `text`; returns false on any mismatch.
bool ParseDoubles(const std::string& text, std::size_t count,
                  std::vector<double>& out) {
  out.clear();
  std::istringstream in(text);
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) return false;
  return out.size() == count;
}

Eigen::Matrix4d FromRowMajor3x4(const std::vector<double>& v) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = v[static_cast<std::size_t>(4 * r + c)];
  }
  return m;
}

std::string RowMajor3x4(const Eigen::Matrix4d& m) {
  std::string line;
  char buf[64];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      if (!line.empty()) line += ' ';
      line += buf;
    }
  }
  return line;
}

// Projects the rotation block back onto SO(3); absorbs the ~1e-9 rounding in
// KITTI's ASCII poses so downstream invariants hold at 1e-6.
Eigen::Matrix3d Orthonormalize(const Eigen::Matrix3d& r) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  Eigen::Matrix3d result = svd.matrixU() * svd.matrixV().transpose();
  if (result.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    result = u * svd.matrixV().transpose();
  }
  return result;
}

}  // namespace

PointCloud ReadPointCloud(const fs::path& path, std::uint32_t frame_id) {
  const auto bytes = ReadBytes(path);
  if (bytes.size() % 16 != 0) {
    throw Error(ErrorCategory::kFormat,
                path.string() + ": size " + std::to_string(bytes.size()) +
                    " is not a multiple of 16 bytes");
  }
  PointCloud cloud;
  cloud.frame_id = frame_id;
  cloud.points.resize(bytes.size() / 16);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const unsigned char* p = bytes.data() + 16 * i;
    Point& pt = cloud.points[i];
    pt.x = LoadF32(p);
    pt.y = LoadF32(p + 4);
    pt.z = LoadF32(p + 8);
    pt.intensity = LoadF32(p + 12);
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z)) {
      throw Error(ErrorCategory::kFormat, path.string() +
                                              ": non-finite coordinate at point " +
                                              std::to_string(i));
    }
  }
  return cloud;
}

void WritePointCloud(const fs::path& path, const PointCloud& cloud) {
  std::vector<unsigned char> bytes(cloud.points.size() * 16);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    unsigned char* p = bytes.data() + 16 * i;
    const Point& pt = cloud.points[i];
    StoreF32(pt.x, p);
    StoreF32(pt.y, p + 4);
    StoreF32(pt.z, p + 8);
    StoreF32(pt.intensity, p + 12);
  }
  WriteBytes(path, bytes);
}

SemanticLabels ReadLabels(const fs::path& path, std::size_t expected_count,
                          std::uint32_t frame_id) {
  const auto bytes = ReadBytes(path);
  if (bytes.size() != 4 * expected_count) {
    throw Error(ErrorCategory::kFormat,
                path.string() + ": holds " + std::to_string(bytes.size() / 4) +
                    (bytes.size() % 4 ? "+ partial" : "") +
                    " labels, expected " + std::to_string(expected_count));
  }
  SemanticLabels labels;
  labels.frame_id = frame_id;
  labels.class_ids.resize(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    labels.class_ids[i] =
        static_cast<std::uint16_t>(LoadU32(bytes.data() + 4 * i) & 0xFFFFu);
  }
  return labels;
}

void WriteLabels(const fs::path& path, const SemanticLabels& labels) {
  std::vector<unsigned char> bytes(labels.class_ids.size() * 4);
  for (std::size_t i = 0; i < labels.class_ids.size(); ++i) {
    StoreU32(labels.class_ids[i], bytes.data() + 4 * i);
  }
  WriteBytes(path, bytes);
}

Eigen::Matrix4d ReadCalibration(const fs::path& calib_path) {
  std::ifstream in(calib_path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open " + calib_path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("Tr:", 0) != 0) continue;
    std::vector<double> values;
    if (!ParseDoubles(line.substr(3), 12, values)) {
      throw Error(ErrorCategory::kFormat,
                  calib_path.string() + ":" + std::to_string(line_no) +
                      ": Tr entry must hold 12 numbers");
    }
    return FromRowMajor3x4(values);
  }
  throw Error(ErrorCategory::kFormat,
              calib_path.string() + ": missing Tr entry");
}

std::vector<FramePose> ReadPoses(const fs::path& poses_path,
                                 const fs::path& calib_path) {
  const Eigen::Matrix4d tr = ReadCalibration(calib_path);
  const Eigen::Matrix4d tr_inv = tr.inverse();
  std::ifstream in(poses_path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open " + poses_path.string());

  std::vector<FramePose> poses;
  std::string line;
  int line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!ParseDoubles(line, 12, values)) {
      throw Error(ErrorCategory::kFormat,
                  poses_path.string() + ":" + std::to_string(line_no) +
                      ": expected 12 numbers");
    }
    const Eigen::Matrix4d lidar = tr_inv * FromRowMajor3x4(values) * tr;
    FramePose pose;
    pose.frame_id = static_cast<std::uint32_t>(poses.size());
    pose.rotation = Orthonormalize(lidar.topLeftCorner<3, 3>());
    pose.translation = lidar.topRightCorner<3, 1>();
    poses.push_back(pose);
  }
  return poses;
}

void WritePoses(const fs::path& poses_path, const std::vector<FramePose>& poses,
                const Eigen::Matrix4d& tr) {
  std::ofstream out(poses_path, std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + poses_path.string());
  const Eigen::Matrix4d tr_inv = tr.inverse();
  for (const auto& pose : poses) {
    Eigen::Matrix4d lidar = Eigen::Matrix4d::Identity();
    lidar.topLeftCorner<3, 3>() = pose.rotation;
    lidar.topRightCorner<3, 1>() = pose.translation;
    out << RowMajor3x4(tr * lidar * tr_inv) << '\n';
  }
}

void WriteCalibration(const fs::path& calib_path, const Eigen::Matrix4d& tr) {
  std::ofstream out(calib_path, std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + calib_path.string());
  out << "Tr: " << RowMajor3x4(tr) << '\n';
}

fs::path SequenceLayout::VelodynePath(std::uint32_t frame_id) const {
  return root / "velodyne" / (FrameName(frame_id) + ".bin");
}

fs::path SequenceLayout::LabelPath(std::uint32_t frame_id) const {
  return root / "labels" / (FrameName(frame_id) + ".label");
}

SequenceLayout OpenSequence(const fs::path& root, bool require_poses) {
  std::vector<std::string> missing;
  if (!fs::is_directory(root / "velodyne")) missing.push_back("velodyne/");
  if (!fs::is_directory(root / "labels")) missing.push_back("labels/");
  if (require_poses && !fs::is_regular_file(root / "poses.txt")) {
    missing.push_back("poses.txt");
  }
  if (require_poses && !fs::is_regular_file(root / "calib.txt")) {
    missing.push_back("calib.txt");
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorCategory::kIo,
                root.string() + ": missing " + list);
  }

  SequenceLayout layout;
  layout.root = root;
  for (const auto& entry : fs::directory_iterator(root / "velodyne")) {
    if (entry.path().extension() != ".bin") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() ||
        !std::all_of(stem.begin(), stem.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    layout.frame_ids.push_back(static_cast<std::uint32_t>(std::stoul(stem)));
  }
  std::sort(layout.frame_ids.begin(), layout.frame_ids.end());
  return layout;
}

LabeledCloud LoadFrame(const SequenceLayout& layout, std::uint32_t frame_id) {
  LabeledCloud frame;
  try {
    frame.cloud = ReadPointCloud(layout.VelodynePath(frame_id), frame_id);
    frame.labels = ReadLabels(layout.LabelPath(frame_id),
                              frame.cloud.points.size(), frame_id);
  } catch (const Error& e) {
    throw Error(e.category(),
                "frame " + FrameName(frame_id) + ": " + e.what());
  }
  return frame;
}

std::string FormatCsvNumber(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::string FrameName(std::uint32_t frame_id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06u", frame_id);
  return buf;
}

}  // namespace osc
