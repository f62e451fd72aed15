#pragma once

// File formats:
//   pose/<id>.txt     4 lines x 4 floats, camera-to-world, 17 significant digits
//   intrinsics.txt    key=value lines: fx, fy, cx, cy, width, height
//   depth/<id>.ccd    "CCD1", u32 width, u32 height, f32 meters (0 = invalid)
//   *.cct             "CCT1", u32 rank, u32 dims[rank], f64 payload, row-major
//   manifest.jsonl    {"scene","target","contexts":[4],"coverage","target_pose":[16]}
//   scene.json        room box, obstacle boxes and seed of a synthetic scene
// All binary integers and floats are little-endian.

#include <algorithm>
#include <array>
#include <cctype>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "camcue/camera.hpp"
#include "camcue/error.hpp"
#include "camcue/frame.hpp"
#include "camcue/synth_scene.hpp"
#include "camcue/view_selection.hpp"

namespace camcue::io {

namespace fs = std::filesystem;

// --------------------------------------------------------------------------
// Raw file access

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(bytes.data(), bytes.size());
}

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string where) : data_(data), where_(std::move(where)) {}

  template <typename T>
  T get() {
    if (remaining() < sizeof(T)) fail(ErrorCode::TruncatedPayload, where_ + ": unexpected end of data");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }

  void expect_magic(std::string_view magic) {
    if (data_.size() < magic.size() || data_.substr(0, magic.size()) != magic)
      fail(ErrorCode::BadMagic, where_ + ": expected magic \"" + std::string(magic) + "\"");
    pos_ = magic.size();
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  const std::string& where() const { return where_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string where_;
};

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace detail

// --------------------------------------------------------------------------
// Binary tensors

struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<double> data;

  std::size_t numel() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
  bool operator==(const Tensor&) const = default;
};

inline constexpr std::uint32_t kMaxTensorRank = 16;

inline std::string encode_tensor(const Tensor& t) {
  if (t.numel() != t.data.size()) fail(ErrorCode::ShapeMismatch, "tensor payload does not match dims");
  std::string out = "CCT1";
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) detail::put_le<std::uint32_t>(out, d);
  for (double v : t.data) detail::put_le<double>(out, v);
  return out;
}

inline Tensor decode_tensor(std::string_view bytes, const std::string& where = "tensor") {
  detail::ByteReader r(bytes, where);
  r.expect_magic("CCT1");
  const auto rank = r.get<std::uint32_t>();
  if (rank > kMaxTensorRank) fail(ErrorCode::InvalidValue, where + ": tensor rank too large");
  Tensor t;
  // Element count saturates just above what the remaining bytes could hold.
  const std::uint64_t cap = r.remaining() / 8 + 1;
  std::uint64_t count = 1;
  bool empty = false;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = r.get<std::uint32_t>();
    t.dims.push_back(d);
    if (d == 0) empty = true;
    else count = count > cap / d ? cap : std::min(cap, count * d);
  }
  if (empty) count = 0;
  if (count * 8 > r.remaining()) fail(ErrorCode::TruncatedPayload, where + ": tensor payload truncated");
  if (count * 8 < r.remaining()) fail(ErrorCode::TrailingData, where + ": bytes after tensor payload");
  t.data.resize(count);
  for (auto& v : t.data) v = r.get<double>();
  return t;
}

inline void write_tensor(const fs::path& path, const Tensor& t) { write_file(path, encode_tensor(t)); }
inline Tensor read_tensor(const fs::path& path) { return decode_tensor(read_file(path), path.string()); }

// --------------------------------------------------------------------------
// Depth maps

inline std::string encode_depth(const DepthMap& d) {
  d.validate();
  std::string out = "CCD1";
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.width));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.height));
  for (double v : d.values) detail::put_le<float>(out, static_cast<float>(v));
  return out;
}

inline DepthMap decode_depth(std::string_view bytes, const std::string& where = "depth") {
  detail::ByteReader r(bytes, where);
  r.expect_magic("CCD1");
  const auto w = r.get<std::uint32_t>();
  const auto h = r.get<std::uint32_t>();
  if (w > (1u << 20) || h > (1u << 20)) fail(ErrorCode::InvalidValue, where + ": depth dimensions too large");
  const std::uint64_t need = static_cast<std::uint64_t>(w) * h * 4;
  if (need > r.remaining()) fail(ErrorCode::TruncatedPayload, where + ": depth payload truncated");
  if (need < r.remaining()) fail(ErrorCode::TrailingData, where + ": bytes after depth payload");
  DepthMap d(static_cast<int>(w), static_cast<int>(h));
  for (auto& v : d.values) {
    const float f = r.get<float>();
    if (!std::isfinite(f) || f < 0.0f) fail(ErrorCode::InvalidValue, where + ": depth must be finite and >= 0");
    v = f;
  }
  return d;
}

inline void write_depth(const fs::path& path, const DepthMap& d) { write_file(path, encode_depth(d)); }
inline DepthMap read_depth(const fs::path& path) { return decode_depth(read_file(path), path.string()); }

// --------------------------------------------------------------------------
// Pose text files

inline constexpr double kPoseRejectTolerance = 1e-4;
inline constexpr double kPoseExactTolerance = 1e-9;

struct LoadedPose {
  CameraPose pose;
  double rigidity_error = 0.0;
  // Set when the rotation block was re-orthonormalized on load.
  std::optional<std::string> warning;
};

inline std::string format_pose(const Mat4& m) {
  std::string out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (c) out += ' ';
      out += detail::format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

inline LoadedPose parse_pose(std::string_view text, const std::string& where = "pose") {
  Mat4 m;
  int row = 0;
  for (std::string_view line : detail::split_lines(text)) {
    if (detail::blank(line)) continue;
    const auto tokens = detail::split_ws(line);
    if (row >= 4) fail(ErrorCode::MalformedPose, where + ": more than 4 rows");
    if (tokens.size() != 4)
      fail(ErrorCode::MalformedPose, where + ": row " + std::to_string(row + 1) + " needs 4 values");
    for (int c = 0; c < 4; ++c) {
      const auto v = detail::parse_double(tokens[c]);
      if (!v || !std::isfinite(*v))
        fail(ErrorCode::MalformedPose, where + ": bad number '" + std::string(tokens[c]) + "'");
      m(row, c) = *v;
    }
    ++row;
  }
  if (row != 4) fail(ErrorCode::MalformedPose, where + ": expected 4 rows, got " + std::to_string(row));
  const Eigen::RowVector4d bottom(0.0, 0.0, 0.0, 1.0);
  if ((m.row(3) - bottom).cwiseAbs().maxCoeff() > kPoseExactTolerance)
    fail(ErrorCode::MalformedPose, where + ": bottom row must be 0 0 0 1");
  m.row(3) = bottom;

  LoadedPose out;
  const Mat3 r = m.topLeftCorner<3, 3>();
  out.rigidity_error = camcue::detail::orthonormality_error(r);
  if (out.rigidity_error > kPoseRejectTolerance)
    fail(ErrorCode::MalformedPose, where + ": rotation block is not rigid");
  if (out.rigidity_error > kPoseExactTolerance) {
    m.topLeftCorner<3, 3>() = orthonormalize(r);
    out.warning = where + ": rotation re-orthonormalized (error " + detail::format_double(out.rigidity_error) + ")";
  }
  out.pose = CameraPose::from_matrix(m);
  return out;
}

inline void write_pose_file(const fs::path& path, const CameraPose& pose) {
  write_file(path, format_pose(pose.matrix()));
}
inline LoadedPose read_pose_file(const fs::path& path) { return parse_pose(read_file(path), path.string()); }

// --------------------------------------------------------------------------
// Intrinsics

inline std::string format_intrinsics(const CameraIntrinsics& k) {
  std::string out;
  out += "fx=" + detail::format_double(k.fx) + "\n";
  out += "fy=" + detail::format_double(k.fy) + "\n";
  out += "cx=" + detail::format_double(k.cx) + "\n";
  out += "cy=" + detail::format_double(k.cy) + "\n";
  out += "width=" + std::to_string(k.width) + "\n";
  out += "height=" + std::to_string(k.height) + "\n";
  return out;
}

inline CameraIntrinsics parse_intrinsics(std::string_view text, const std::string& where = "intrinsics") {
  static const std::array<std::string_view, 6> kKeys{"fx", "fy", "cx", "cy", "width", "height"};
  std::map<std::string, double, std::less<>> values;
  int lineno = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++lineno;
    const auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    const std::string loc = where + ":" + std::to_string(lineno);
    std::string joined;
    for (auto t : tokens) joined += t;
    const auto eq = joined.find('=');
    if (eq == std::string::npos) fail(ErrorCode::MalformedIntrinsics, loc + ": expected key=value");
    const std::string key = joined.substr(0, eq);
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      fail(ErrorCode::MalformedIntrinsics, loc + ": unknown key '" + key + "'");
    if (values.count(key)) fail(ErrorCode::MalformedIntrinsics, loc + ": duplicate key '" + key + "'");
    const auto v = detail::parse_double(std::string_view(joined).substr(eq + 1));
    if (!v || !std::isfinite(*v)) fail(ErrorCode::MalformedIntrinsics, loc + ": bad value for '" + key + "'");
    values[key] = *v;
  }
  for (auto key : kKeys)
    if (!values.count(key)) fail(ErrorCode::MissingKey, where + ": missing '" + std::string(key) + "'");
  if (!(values["fx"] > 0.0) || !(values["fy"] > 0.0))
    fail(ErrorCode::NonPositiveFocal, where + ": fx and fy must be positive");
  for (auto key : {"width", "height"}) {
    const double v = values[key];
    if (v != std::floor(v) || v < 1.0 || v > (1 << 20))
      fail(ErrorCode::MalformedIntrinsics, where + ": " + key + " must be a positive integer");
  }
  CameraIntrinsics k{values["fx"], values["fy"], values["cx"], values["cy"], static_cast<int>(values["width"]),
                     static_cast<int>(values["height"])};
  try {
    k.validate();
  } catch (const Error& e) {
    fail(ErrorCode::MalformedIntrinsics, where + ": " + e.what());
  }
  return k;
}

inline void write_intrinsics(const fs::path& path, const CameraIntrinsics& k) {
  write_file(path, format_intrinsics(k));
}
inline CameraIntrinsics read_intrinsics(const fs::path& path) {
  return parse_intrinsics(read_file(path), path.string());
}

// --------------------------------------------------------------------------
// Group manifests

inline constexpr std::size_t kManifestContexts = 4;

inline std::string manifest_line(const ViewGroup& g) {
  nlohmann::ordered_json j;
  j["scene"] = g.scene;
  j["target"] = g.target_id;
  j["contexts"] = g.context_ids;
  j["coverage"] = g.coverage;
  std::vector<double> pose(16);
  for (int i = 0; i < 16; ++i) pose[i] = g.target_pose(i / 4, i % 4);
  j["target_pose"] = pose;
  return j.dump() + "\n";
}

inline std::string encode_manifest(const std::vector<ViewGroup>& groups) {
  std::string out;
  for (const auto& g : groups) {
    if (g.context_ids.size() != kManifestContexts)
      fail(ErrorCode::InvalidArgument, "manifest groups must have exactly 4 contexts");
    out += manifest_line(g);
  }
  return out;
}

inline ViewGroup parse_manifest_line(std::string_view line, std::size_t lineno) {
  const std::string loc = "line " + std::to_string(lineno);
  auto bad = [&](const std::string& why) { fail(ErrorCode::MalformedLine, loc + ": " + why); };
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad("not a JSON object");
  for (auto key : {"scene", "target", "contexts", "coverage", "target_pose"})
    if (!j.contains(key)) bad(std::string("missing '") + key + "'");
  if (!j["scene"].is_string()) bad("'scene' must be a string");
  if (!j["target"].is_number_integer()) bad("'target' must be an integer");
  const auto& ctx = j["contexts"];
  if (!ctx.is_array() || ctx.size() != kManifestContexts) bad("'contexts' must list exactly 4 ids");
  if (!j["coverage"].is_number()) bad("'coverage' must be a number");
  const auto& pose = j["target_pose"];
  if (!pose.is_array() || pose.size() != 16) bad("'target_pose' must have 16 numbers");

  ViewGroup g;
  g.scene = j["scene"].get<std::string>();
  const auto target = j["target"].get<std::int64_t>();
  if (target < INT32_MIN || target > INT32_MAX) bad("'target' out of range");
  g.target_id = static_cast<int>(target);
  std::set<std::int64_t> seen{target};
  for (const auto& c : ctx) {
    if (!c.is_number_integer()) bad("context ids must be integers");
    const auto id = c.get<std::int64_t>();
    if (id < INT32_MIN || id > INT32_MAX) bad("context id out of range");
    if (!seen.insert(id).second) bad("context ids must be distinct and differ from the target");
    g.context_ids.push_back(static_cast<int>(id));
  }
  g.coverage = j["coverage"].get<double>();
  if (!(g.coverage >= 0.0 && g.coverage <= 1.0)) bad("'coverage' must be in [0, 1]");
  for (int i = 0; i < 16; ++i) {
    if (!pose[i].is_number()) bad("'target_pose' entries must be numbers");
    g.target_pose(i / 4, i % 4) = pose[i].get<double>();
  }
  if (!g.target_pose.allFinite()) bad("'target_pose' entries must be finite");
  return g;
}

inline std::vector<ViewGroup> decode_manifest(std::string_view text) {
  std::vector<ViewGroup> out;
  std::size_t lineno = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++lineno;
    if (detail::blank(line)) continue;
    out.push_back(parse_manifest_line(line, lineno));
  }
  return out;
}

inline void write_manifest(const fs::path& path, const std::vector<ViewGroup>& groups) {
  write_file(path, encode_manifest(groups));
}
inline std::vector<ViewGroup> read_manifest(const fs::path& path) { return decode_manifest(read_file(path)); }

// --------------------------------------------------------------------------
// Synthetic scene description

inline nlohmann::ordered_json to_json(const Scene& s) {
  auto vec = [](const Vec3& v) { return std::vector<double>{v.x(), v.y(), v.z()}; };
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["room"] = {{"min", vec(s.room.min)}, {"max", vec(s.room.max)}};
  j["obstacles"] = nlohmann::ordered_json::array();
  for (const auto& o : s.obstacles)
    j["obstacles"].push_back({{"id", o.id}, {"min", vec(o.box.min)}, {"max", vec(o.box.max)}});
  return j;
}

inline Scene scene_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& why) { fail(ErrorCode::MalformedScene, "scene.json: " + why); };
  auto vec = [&](const nlohmann::json& a) {
    if (!a.is_array() || a.size() != 3) bad("expected a 3-vector");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      if (!a[i].is_number()) bad("vector entries must be numbers");
      v[i] = a[i].get<double>();
    }
    if (!v.allFinite()) bad("vector entries must be finite");
    return v;
  };
  auto box = [&](const nlohmann::json& b) {
    if (!b.is_object() || !b.contains("min") || !b.contains("max")) bad("box needs min and max");
    Box out{vec(b["min"]), vec(b["max"])};
    if (!(out.min.array() < out.max.array()).all()) bad("box extents must be positive");
    return out;
  };
  if (!j.is_object() || !j.contains("room") || !j.contains("obstacles") || !j.contains("seed"))
    bad("needs seed, room and obstacles");
  if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
  Scene s;
  s.seed = j["seed"].get<std::uint64_t>();
  s.room = box(j["room"]);
  if (!j["obstacles"].is_array()) bad("obstacles must be an array");
  for (const auto& o : j["obstacles"]) {
    if (!o.is_object() || !o.contains("id") || !o["id"].is_number_integer()) bad("obstacle needs an integer id");
    Obstacle ob{o["id"].get<int>(), box(o)};
    if (!(ob.box.min.array() > s.room.min.array()).all() || !(ob.box.max.array() < s.room.max.array()).all())
      bad("obstacle must lie strictly inside the room");
    s.obstacles.push_back(ob);
  }
  return s;
}

// --------------------------------------------------------------------------
// Scene directories

struct SceneDir {
  std::string name;
  CameraIntrinsics intrinsics;
  std::vector<Frame> frames;  // ascending id
  std::optional<Scene> scene;
  std::vector<std::string> warnings;
};

// Optional fallback reader for frames without a .ccd file (e.g. 16-bit PNG).
using DepthFallback = std::function<std::optional<DepthMap>(const fs::path& depth_dir, int frame_id)>;

inline std::optional<int> parse_frame_id(const fs::path& file) {
  const std::string stem = file.stem().string();
  int id = 0;
  const auto res = std::from_chars(stem.data(), stem.data() + stem.size(), id);
  if (res.ec != std::errc() || res.ptr != stem.data() + stem.size() || id < 0) return std::nullopt;
  return id;
}

inline SceneDir read_scene_dir(const fs::path& dir, const DepthFallback& fallback = {}) {
  auto bad = [&](const std::string& why) { fail(ErrorCode::MalformedScene, dir.string() + ": " + why); };
  if (!fs::is_directory(dir)) bad("not a directory");
  SceneDir out;
  out.name = fs::absolute(dir).lexically_normal().filename().string();
  if (out.name.empty()) out.name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  if (!fs::exists(dir / "intrinsics.txt")) bad("missing intrinsics.txt");
  out.intrinsics = read_intrinsics(dir / "intrinsics.txt");
  if (fs::exists(dir / "scene.json")) {
    const auto j = nlohmann::json::parse(read_file(dir / "scene.json"), nullptr, false);
    if (j.is_discarded()) bad("scene.json is not valid JSON");
    out.scene = scene_from_json(j);
  }

  std::set<int> pose_ids, depth_ids;
  if (fs::is_directory(dir / "pose")) {
    for (const auto& e : fs::directory_iterator(dir / "pose")) {
      if (e.path().extension() != ".txt") continue;
      const auto id = parse_frame_id(e.path());
      if (!id) bad("pose file name is not a frame id: " + e.path().filename().string());
      pose_ids.insert(*id);
    }
  }
  if (fs::is_directory(dir / "depth")) {
    for (const auto& e : fs::directory_iterator(dir / "depth")) {
      const auto ext = e.path().extension();
      if (ext != ".ccd" && ext != ".png") continue;
      if (const auto id = parse_frame_id(e.path())) depth_ids.insert(*id);
    }
  }
  for (int id : depth_ids)
    if (!pose_ids.count(id)) bad("depth frame " + std::to_string(id) + " has no pose file");

  for (int id : pose_ids) {
    Frame f;
    f.id = id;
    auto loaded = read_pose_file(dir / "pose" / (std::to_string(id) + ".txt"));
    f.pose = loaded.pose;
    if (loaded.warning) out.warnings.push_back(*loaded.warning);
    f.intrinsics = out.intrinsics;
    const fs::path ccd = dir / "depth" / (std::to_string(id) + ".ccd");
    if (fs::exists(ccd)) {
      f.depth = read_depth(ccd);
    } else if (auto alt = fallback ? fallback(dir / "depth", id) : std::nullopt) {
      f.depth = std::move(*alt);
    } else {
      bad("missing depth for frame " + std::to_string(id));
    }
    if (f.depth.width != out.intrinsics.width || f.depth.height != out.intrinsics.height)
      bad("depth size of frame " + std::to_string(id) + " does not match intrinsics");
    out.frames.push_back(std::move(f));
  }
  return out;
}

/// Writes frames (pose + depth at f32 precision), intrinsics and optionally
/// the scene description. Output bytes depend only on the inputs.
inline void write_scene_dir(const fs::path& dir, const CameraIntrinsics& k, const std::vector<Frame>& frames,
                            const Scene* scene = nullptr) {
  std::error_code ec;
  if (fs::exists(dir, ec) && !fs::is_directory(dir, ec))
    fail(ErrorCode::IoError, dir.string() + " exists and is not a directory");
  fs::create_directories(dir / "pose", ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + (dir / "pose").string() + ": " + ec.message());
  fs::create_directories(dir / "depth", ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + (dir / "depth").string() + ": " + ec.message());
  write_intrinsics(dir / "intrinsics.txt", k);
  if (scene) write_file(dir / "scene.json", to_json(*scene).dump(2) + "\n");
  for (const auto& f : frames) {
    write_pose_file(dir / "pose" / (std::to_string(f.id) + ".txt"), f.pose);
    write_depth(dir / "depth" / (std::to_string(f.id) + ".ccd"), f.depth);
  }
}

}  // namespace camcue::io
