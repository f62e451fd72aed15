#pragma once

// Pixel-aligned Plücker ray maps and their patch tokenization.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "camcue/camera.hpp"
#include "camcue/error.hpp"

namespace camcue {

inline constexpr int kRayChannels = 6;

/// Per pixel: unit direction d then moment m = o x d, row-major over pixels.
/// The camera center o is kept so resampled maps can recompute exact moments.
struct RayMap {
  int width = 0;
  int height = 0;
  Vec3 origin = Vec3::Zero();
  std::vector<double> data;

  RayMap() = default;
  RayMap(int w, int h, const Vec3& o)
      : width(w), height(h), origin(o), data(static_cast<std::size_t>(w) * h * kRayChannels, 0.0) {}

  std::size_t offset(int u, int v) const { return (static_cast<std::size_t>(v) * width + u) * kRayChannels; }
  Vec3 direction(int u, int v) const {
    const double* p = data.data() + offset(u, v);
    return {p[0], p[1], p[2]};
  }
  Vec3 moment(int u, int v) const {
    const double* p = data.data() + offset(u, v) + 3;
    return {p[0], p[1], p[2]};
  }
  void set(int u, int v, const Vec3& d, const Vec3& m) {
    double* p = data.data() + offset(u, v);
    p[0] = d.x(), p[1] = d.y(), p[2] = d.z();
    p[3] = m.x(), p[4] = m.y(), p[5] = m.z();
  }

  bool operator==(const RayMap&) const = default;
};

struct PatchConfig {
  int canonical_width = 448;
  int canonical_height = 448;
  int patch_size = 14;
  int token_dim = 64;

  int grid_width() const { return canonical_width / patch_size; }
  int grid_height() const { return canonical_height / patch_size; }
  int num_tokens() const { return grid_width() * grid_height(); }
  int patch_features() const { return kRayChannels * patch_size * patch_size; }

  void validate() const {
    if (patch_size < 1 || canonical_width < 1 || canonical_height < 1)
      fail(ErrorCode::ConfigError, "patch size and canonical resolution must be positive");
    if (canonical_width % patch_size != 0 || canonical_height % patch_size != 0)
      fail(ErrorCode::ConfigError, "patch size must divide the canonical resolution");
    if (token_dim < 1) fail(ErrorCode::ConfigError, "token_dim must be >= 1");
  }
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// S x d tokens, one row per patch, rows ordered row-major over the patch grid.
template <typename Scalar = double>
struct TokenGrid {
  int grid_height = 0;
  int grid_width = 0;
  Matrix<Scalar> tokens;

  int size() const { return static_cast<int>(tokens.rows()); }
  int dim() const { return static_cast<int>(tokens.cols()); }
};

// Seeded uniform(-a, a) fill with a = 1 / sqrt(fan_in).
template <typename Scalar>
void fill_uniform_fan_in(Matrix<Scalar>& m, int fan_in, std::mt19937_64& rng) {
  const double a = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
  std::uniform_real_distribution<double> dist(-a, a);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(dist(rng));
}

/// Linear patch embedding: token = weight * flattened_patch + bias.
template <typename Scalar = double>
struct EmbedParams {
  Matrix<Scalar> weight;  // d x (6 p^2)
  Vector<Scalar> bias;    // d

  static EmbedParams init(const PatchConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    EmbedParams p;
    p.weight.resize(cfg.token_dim, cfg.patch_features());
    Matrix<Scalar> b(cfg.token_dim, 1);
    fill_uniform_fan_in(p.weight, cfg.patch_features(), rng);
    fill_uniform_fan_in(b, cfg.patch_features(), rng);
    p.bias = b.col(0);
    return p;
  }
};

/// Ray map for `pose` with intrinsics rescaled to an out_w x out_h grid that
/// covers the same field of view.
inline RayMap ray_map(const CameraPose& pose, const CameraIntrinsics& k, int out_w, int out_h) {
  k.validate();
  if (out_w < 1 || out_h < 1) fail(ErrorCode::InvalidArgument, "ray map size must be positive");
  const CameraIntrinsics ks = (out_w == k.width && out_h == k.height) ? k : k.scaled_to(out_w, out_h);
  const Mat3 r = pose.rotation();
  const Vec3 o = pose.center();
  RayMap map(out_w, out_h, o);
  for (int v = 0; v < out_h; ++v) {
    for (int u = 0; u < out_w; ++u) {
      const Vec3 d = (r * pixel_ray_camera(u, v, ks)).normalized();
      map.set(u, v, d, o.cross(d));
    }
  }
  return map;
}

/// Bilinear resample of the direction channels to the canonical resolution,
/// then per-pixel renormalization and exact moment recomputation.
inline RayMap resize_ray_map(const RayMap& map, const PatchConfig& cfg) {
  cfg.validate();
  const int ow = cfg.canonical_width;
  const int oh = cfg.canonical_height;
  if (ow == map.width && oh == map.height) return map;
  if (map.width < 1 || map.height < 1) fail(ErrorCode::ShapeMismatch, "cannot resize an empty ray map");

  const double sx = static_cast<double>(map.width) / ow;
  const double sy = static_cast<double>(map.height) / oh;
  RayMap out(ow, oh, map.origin);
  for (int v = 0; v < oh; ++v) {
    const double fy = std::clamp((v + 0.5) * sy - 0.5, 0.0, map.height - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, map.height - 1);
    const double ty = fy - y0;
    for (int u = 0; u < ow; ++u) {
      const double fx = std::clamp((u + 0.5) * sx - 0.5, 0.0, map.width - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, map.width - 1);
      const double tx = fx - x0;
      const Vec3 top = (1.0 - tx) * map.direction(x0, y0) + tx * map.direction(x1, y0);
      const Vec3 bottom = (1.0 - tx) * map.direction(x0, y1) + tx * map.direction(x1, y1);
      const Vec3 d = ((1.0 - ty) * top + ty * bottom).normalized();
      out.set(u, v, d, map.origin.cross(d));
    }
  }
  return out;
}

/// Flattens patch (row, col) of the map into (row, col, channel) order.
template <typename Scalar = double>
Vector<Scalar> flatten_patch(const RayMap& map, int patch_row, int patch_col, int p) {
  Vector<Scalar> x(kRayChannels * p * p);
  Eigen::Index k = 0;
  for (int r = 0; r < p; ++r) {
    const int v = patch_row * p + r;
    for (int c = 0; c < p; ++c) {
      const int u = patch_col * p + c;
      const double* px = map.data.data() + map.offset(u, v);
      for (int ch = 0; ch < kRayChannels; ++ch) x(k++) = static_cast<Scalar>(px[ch]);
    }
  }
  return x;
}

/// All flattened patches as rows of an S x (6 p^2) matrix.
template <typename Scalar = double>
Matrix<Scalar> patch_matrix(const RayMap& map, const PatchConfig& cfg) {
  cfg.validate();
  if (map.width != cfg.canonical_width || map.height != cfg.canonical_height)
    fail(ErrorCode::ShapeMismatch, "ray map must be at canonical resolution before patchify");
  Matrix<Scalar> patches(cfg.num_tokens(), cfg.patch_features());
  for (int pr = 0; pr < cfg.grid_height(); ++pr)
    for (int pc = 0; pc < cfg.grid_width(); ++pc)
      patches.row(pr * cfg.grid_width() + pc) = flatten_patch<Scalar>(map, pr, pc, cfg.patch_size).transpose();
  return patches;
}

template <typename Scalar = double>
TokenGrid<Scalar> embed_patches(const Matrix<Scalar>& patches, const PatchConfig& cfg,
                                const EmbedParams<Scalar>& params) {
  if (params.weight.rows() != cfg.token_dim || params.weight.cols() != cfg.patch_features() ||
      params.bias.size() != cfg.token_dim)
    fail(ErrorCode::ShapeMismatch, "embedding parameters do not match the patch config");
  if (patches.cols() != cfg.patch_features()) fail(ErrorCode::ShapeMismatch, "patch width mismatch");
  TokenGrid<Scalar> grid;
  grid.grid_height = cfg.grid_height();
  grid.grid_width = cfg.grid_width();
  grid.tokens = patches * params.weight.transpose();
  grid.tokens.rowwise() += params.bias.transpose();
  return grid;
}

template <typename Scalar = double>
TokenGrid<Scalar> patchify_embed(const RayMap& map, const PatchConfig& cfg, const EmbedParams<Scalar>& params) {
  return embed_patches(patch_matrix<Scalar>(map, cfg), cfg, params);
}

}  // namespace camcue
