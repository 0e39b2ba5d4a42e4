#include "osc/descriptor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <vector>

#include "osc/error.hpp"

namespace osc {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int PositiveMod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

// Wraps an angle into [0, 2pi).
double WrapPositive(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

class ByteWriter {
 public:
  template <typename T>
  void Put(T value) {
    auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bits.begin(), bits.end());
    }
    bytes_.insert(bytes_.end(), bits.begin(), bits.end());
  }
  void PutRaw(const char* data, std::size_t n) {
    bytes_.insert(bytes_.end(), data, data + n);
  }
  const std::vector<unsigned char>& bytes() const { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::vector<unsigned char> bytes, std::string source)
      : bytes_(std::move(bytes)), source_(std::move(source)) {}

  template <typename T>
  T Get() {
    std::array<unsigned char, sizeof(T)> bits;
    Take(bits.data(), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bits.begin(), bits.end());
    }
    return std::bit_cast<T>(bits);
  }
  void Take(unsigned char* out, std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCategory::kFormat, source_ + ": truncated descriptor file");
    }
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  std::vector<unsigned char> bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace

void ComputeKeys(ObjectScanContext& osc) {
  const Eigen::Index rows = osc.matrix.rows();
  const Eigen::Index cols = osc.matrix.cols();
  // Each row is summed in sorted order, so a column rotation of the grid
  // yields a bit-identical ring key.
  osc.ring_key.resize(rows);
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) row[static_cast<std::size_t>(j)] = osc.matrix(i, j);
    std::sort(row.begin(), row.end());
    double sum = 0.0;
    for (const double v : row) sum += v;
    osc.ring_key[i] = cols > 0 ? sum / static_cast<double>(cols) : 0.0;
  }
  osc.sector_key = osc.matrix.colwise().mean().transpose();
}

ObjectScanContext BuildObjectScanContext(const PointCloud& cloud,
                                         const MainObject& object,
                                         const OscConfig& config) {
  if (object.frame_id != cloud.frame_id) {
    throw Error(ErrorCategory::kPrecondition,
                "object of frame " + std::to_string(object.frame_id) +
                    " used with cloud of frame " +
                    std::to_string(cloud.frame_id));
  }
  const double xo = object.centroid_x;
  const double yo = object.centroid_y;
  if (std::hypot(xo, yo) < config.min_object_range) {
    throw Error(ErrorCategory::kPrecondition,
                "object closer than min_object_range to the sensor");
  }

  const int rings = config.num_rings;
  const int sectors = config.num_sectors;
  const double ring_width = config.max_radius / rings;
  const double sector_width = kTwoPi / sectors;
  const double reference = std::atan2(yo, xo);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rings, sectors);
  Eigen::MatrixXi count = Eigen::MatrixXi::Zero(rings, sectors);
  for (const Point& p : cloud.points) {
    const double dx = static_cast<double>(p.x) - xo;
    const double dy = static_cast<double>(p.y) - yo;
    const double r = std::hypot(dx, dy);
    if (r > config.max_radius) continue;
    const int ring = std::min(static_cast<int>(r / ring_width), rings - 1);
    // A point on the pole itself has no bearing; it goes to sector 0.
    const double angle =
        r > 0.0 ? WrapPositive(std::atan2(dy, dx) - reference) : 0.0;
    const int sector =
        std::min(static_cast<int>(angle / sector_width), sectors - 1);
    sum(ring, sector) += static_cast<double>(p.z) + config.height_offset;
    count(ring, sector) += 1;
  }

  ObjectScanContext osc;
  osc.object = object;
  osc.matrix = Eigen::MatrixXd::Zero(rings, sectors);
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < sectors; ++j) {
      if (count(i, j) > 0) osc.matrix(i, j) = sum(i, j) / count(i, j);
    }
  }
  ComputeKeys(osc);
  return osc;
}

std::vector<ObjectScanContext> BuildFrameDescriptors(
    const PointCloud& cloud, const std::vector<MainObject>& objects,
    const OscConfig& config) {
  std::vector<ObjectScanContext> descriptors;
  descriptors.reserve(objects.size());
  for (const auto& object : objects) {
    descriptors.push_back(BuildObjectScanContext(cloud, object, config));
  }
  return descriptors;
}

Eigen::MatrixXd RotateColumns(const Eigen::MatrixXd& matrix, int n) {
  const int cols = static_cast<int>(matrix.cols());
  Eigen::MatrixXd out(matrix.rows(), cols);
  if (cols == 0) return out;
  for (int j = 0; j < cols; ++j) {
    out.col(j) = matrix.col(PositiveMod(j + n, cols));
  }
  return out;
}

Eigen::VectorXd RotateLeft(const Eigen::VectorXd& v, int n) {
  const int size = static_cast<int>(v.size());
  Eigen::VectorXd out(size);
  for (int j = 0; j < size; ++j) out[j] = v[PositiveMod(j + n, size)];
  return out;
}

void WriteDescriptors(const fs::path& path,
                      const std::vector<ObjectScanContext>& descriptors) {
  ByteWriter w;
  w.PutRaw("OSCD", 4);
  w.Put<std::uint32_t>(kDescriptorFormatVersion);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(descriptors.size()));
  for (const auto& d : descriptors) {
    w.Put<std::uint32_t>(d.object.frame_id);
    w.Put<std::uint32_t>(d.object.object_index);
    w.Put<double>(d.object.centroid_x);
    w.Put<double>(d.object.centroid_y);
    w.Put<std::uint64_t>(d.object.point_count);
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(d.num_rings()));
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(d.num_sectors()));
    for (int i = 0; i < d.num_rings(); ++i) {
      for (int j = 0; j < d.num_sectors(); ++j) w.Put<double>(d.matrix(i, j));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
}

std::vector<ObjectScanContext> ReadDescriptors(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open " + path.string());
  ByteReader r({std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>()},
               path.string());
  std::array<unsigned char, 4> magic;
  r.Take(magic.data(), 4);
  if (std::memcmp(magic.data(), "OSCD", 4) != 0) {
    throw Error(ErrorCategory::kFormat, path.string() + ": bad magic");
  }
  const auto version = r.Get<std::uint32_t>();
  if (version != kDescriptorFormatVersion) {
    throw Error(ErrorCategory::kFormat, path.string() +
                                            ": unsupported version " +
                                            std::to_string(version));
  }
  const auto count = r.Get<std::uint32_t>();
  std::vector<ObjectScanContext> descriptors;
  for (std::uint32_t k = 0; k < count; ++k) {
    ObjectScanContext d;
    d.object.frame_id = r.Get<std::uint32_t>();
    d.object.object_index = r.Get<std::uint32_t>();
    d.object.centroid_x = r.Get<double>();
    d.object.centroid_y = r.Get<double>();
    d.object.point_count = r.Get<std::uint64_t>();
    const auto rings = r.Get<std::uint32_t>();
    const auto sectors = r.Get<std::uint32_t>();
    if (rings == 0 || sectors == 0 || rings > 4096 || sectors > 4096) {
      throw Error(ErrorCategory::kFormat,
                  path.string() + ": implausible grid size");
    }
    d.matrix.resize(rings, sectors);
    for (std::uint32_t i = 0; i < rings; ++i) {
      for (std::uint32_t j = 0; j < sectors; ++j) d.matrix(i, j) = r.Get<double>();
    }
    ComputeKeys(d);
    descriptors.push_back(std::move(d));
  }
  if (!r.AtEnd()) {
    throw Error(ErrorCategory::kFormat, path.string() + ": trailing bytes");
  }
  return descriptors;
}

}  // namespace osc
