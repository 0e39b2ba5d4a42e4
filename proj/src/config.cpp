#include "osc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "osc/error.hpp"

namespace osc {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kFormat:
      return "format";
    case ErrorCategory::kPrecondition:
      return "precondition";
  }
  return "unknown";
}

namespace {

[[noreturn]] void Fail(const std::string& message) {
  throw Error(ErrorCategory::kConfig, message);
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  text = Trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    Fail("cannot parse value '" + std::string(text) + "' for " +
         std::string(key));
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::string name;
  std::function<void(OscConfig&, std::string_view)> set;
  std::function<std::string(const OscConfig&)> get;
};

template <typename T>
Field MakeField(const char* name, T OscConfig::*member) {
  Field f;
  f.name = name;
  f.set = [name, member](OscConfig& c, std::string_view v) {
    c.*member = ParseNumber<T>(name, v);
  };
  f.get = [member](const OscConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return FormatDouble(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  return f;
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(MakeField("num_rings", &OscConfig::num_rings));
    f.push_back(MakeField("num_sectors", &OscConfig::num_sectors));
    f.push_back(MakeField("max_radius", &OscConfig::max_radius));
    f.push_back(MakeField("min_object_range", &OscConfig::min_object_range));
    f.push_back(MakeField("height_offset", &OscConfig::height_offset));
    Field classes;
    classes.name = "main_object_classes";
    classes.set = [](OscConfig& c, std::string_view v) {
      std::set<std::uint16_t> ids;
      v = Trim(v);
      while (!v.empty()) {
        const auto comma = v.find(',');
        const auto item = Trim(v.substr(0, comma));
        if (!item.empty()) {
          ids.insert(ParseNumber<std::uint16_t>("main_object_classes", item));
        }
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
      }
      c.main_object_classes = std::move(ids);
    };
    classes.get = [](const OscConfig& c) {
      std::string out;
      for (const auto id : c.main_object_classes) {
        if (!out.empty()) out += ',';
        out += std::to_string(id);
      }
      return out;
    };
    f.push_back(std::move(classes));
    f.push_back(MakeField("cluster_tolerance", &OscConfig::cluster_tolerance));
    f.push_back(
        MakeField("cluster_min_points", &OscConfig::cluster_min_points));
    f.push_back(MakeField("knn_candidates", &OscConfig::knn_candidates));
    f.push_back(MakeField("shift_window_halfwidth",
                          &OscConfig::shift_window_halfwidth));
    f.push_back(
        MakeField("similarity_threshold", &OscConfig::similarity_threshold));
    f.push_back(MakeField("pose_cluster_tolerance",
                          &OscConfig::pose_cluster_tolerance));
    f.push_back(MakeField("pose_angle_scale", &OscConfig::pose_angle_scale));
    f.push_back(MakeField("pose_min_cluster_fraction",
                          &OscConfig::pose_min_cluster_fraction));
    f.push_back(MakeField("positive_distance", &OscConfig::positive_distance));
    f.push_back(MakeField("min_frame_gap", &OscConfig::min_frame_gap));
    return f;
  }();
  return fields;
}

}  // namespace

OscConfig Validate(const OscConfig& config) {
  const auto& c = config;
  if (c.num_rings < 1) Fail("num_rings must be >= 1");
  if (c.num_sectors < 2) Fail("num_sectors must be >= 2");
  if (!(c.min_object_range > 0.0)) Fail("min_object_range must be > 0");
  if (!(c.max_radius > c.min_object_range)) {
    Fail("max_radius must be > min_object_range");
  }
  if (!std::isfinite(c.max_radius)) Fail("max_radius must be finite");
  if (!std::isfinite(c.height_offset)) Fail("height_offset must be finite");
  if (!(c.cluster_tolerance > 0.0)) Fail("cluster_tolerance must be > 0");
  if (c.cluster_min_points < 1) Fail("cluster_min_points must be >= 1");
  if (c.knn_candidates < 1) Fail("knn_candidates must be >= 1");
  if (c.shift_window_halfwidth < 0) {
    Fail("shift_window_halfwidth must be >= 0");
  }
  if (2 * c.shift_window_halfwidth + 1 > c.num_sectors) {
    Fail("shift_window_halfwidth: 2k+1 must not exceed num_sectors");
  }
  if (!(c.similarity_threshold >= 0.0 && c.similarity_threshold <= 1.0)) {
    Fail("similarity_threshold must lie in [0, 1]");
  }
  if (!(c.pose_cluster_tolerance > 0.0)) {
    Fail("pose_cluster_tolerance must be > 0");
  }
  if (!(c.pose_angle_scale > 0.0)) Fail("pose_angle_scale must be > 0");
  if (!(c.pose_min_cluster_fraction > 0.0 &&
        c.pose_min_cluster_fraction <= 1.0)) {
    Fail("pose_min_cluster_fraction must lie in (0, 1]");
  }
  if (!(c.positive_distance > 0.0)) Fail("positive_distance must be > 0");
  if (c.min_frame_gap < 0) Fail("min_frame_gap must be >= 0");
  return config;
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : Fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

void SetConfigValue(OscConfig& config, std::string_view key,
                    std::string_view value) {
  for (const auto& f : Fields()) {
    if (f.name == key) {
      f.set(config, value);
      return;
    }
  }
  Fail("unknown config key '" + std::string(key) + "'");
}

OscConfig ParseConfig(std::string_view text, OscConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = Trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      Fail("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    SetConfigValue(base, Trim(view.substr(0, eq)), Trim(view.substr(eq + 1)));
  }
  return base;
}

OscConfig LoadConfigFile(const std::filesystem::path& path, OscConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCategory::kIo, "cannot open config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), std::move(base));
}

std::string FormatConfig(const OscConfig& config) {
  std::string out;
  for (const auto& f : Fields()) {
    out += f.name + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace osc
