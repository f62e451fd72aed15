#pragma once

// Token fusion and the query-attention pose adapter, with hand-derived
// gradients. Tokens are rows; every linear map W acts on a
// row as x * W^T.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "camcue/camera.hpp"
#include "camcue/error.hpp"
#include "camcue/plucker.hpp"

namespace camcue {

template <typename Scalar>
using Mat4T = Eigen::Matrix<Scalar, 4, 4>;

// --------------------------------------------------------------------------
// Configuration and parameters

struct AdapterConfig {
  int n_queries = 16;
  int heads = 4;
  int model_dim = 64;
  int query_out_dim = 32;
  bool pose_output = true;

  int head_dim() const { return model_dim / heads; }

  void validate() const {
    if (n_queries < 1 || heads < 1 || model_dim < 1 || query_out_dim < 1)
      fail(ErrorCode::ConfigError, "adapter dimensions must be positive");
    if (model_dim % heads != 0) fail(ErrorCode::ConfigError, "model_dim must be divisible by heads");
    if (pose_output && n_queries != 16)
      fail(ErrorCode::ConfigError, "pose output needs exactly 16 queries (one per 4x4 entry)");
  }
};

struct LossConfig {
  double lambda_lang = 1.0;
  double lambda_pose = 0.2;

  void validate() const {
    if (!(lambda_lang >= 0.0) || !(lambda_pose >= 0.0)) fail(ErrorCode::ConfigError, "loss weights must be >= 0");
  }
};

template <typename Scalar = double>
struct FusionParams {
  Matrix<Scalar> w;  // d x 2d, input columns ordered [Z | X]

  static FusionParams init(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FusionParams p;
    p.w.resize(dim, 2 * dim);
    fill_uniform_fan_in(p.w, 2 * dim, rng);
    return p;
  }

  static FusionParams zeros(int dim) { return {Matrix<Scalar>::Zero(dim, 2 * dim)}; }

  template <typename Fn>
  void visit(Fn&& fn) {
    fn("fusion.w", w);
  }
};

template <typename Scalar = double>
struct AdapterParams {
  Matrix<Scalar> q0;     // N x d
  Matrix<Scalar> wq;     // d x d
  Matrix<Scalar> wk;     // d x d
  Matrix<Scalar> wv;     // d x d
  Matrix<Scalar> wo;     // d x d
  Matrix<Scalar> psi_w;  // d_q x d
  Vector<Scalar> psi_b;  // d_q
  Vector<Scalar> g_w;    // d_q
  Vector<Scalar> g_b;    // 1

  static AdapterParams init(const AdapterConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    const int d = cfg.model_dim;
    const int dq = cfg.query_out_dim;
    AdapterParams p;
    p.q0.resize(cfg.n_queries, d);
    p.wq.resize(d, d);
    p.wk.resize(d, d);
    p.wv.resize(d, d);
    p.wo.resize(d, d);
    p.psi_w.resize(dq, d);
    Matrix<Scalar> psi_b(dq, 1), g_w(dq, 1), g_b(1, 1);
    // Query embeddings: unit-scale uniform.
    fill_uniform_fan_in(p.q0, 1, rng);
    fill_uniform_fan_in(p.wq, d, rng);
    fill_uniform_fan_in(p.wk, d, rng);
    fill_uniform_fan_in(p.wv, d, rng);
    fill_uniform_fan_in(p.wo, d, rng);
    fill_uniform_fan_in(p.psi_w, d, rng);
    fill_uniform_fan_in(psi_b, d, rng);
    fill_uniform_fan_in(g_w, dq, rng);
    fill_uniform_fan_in(g_b, dq, rng);
    p.psi_b = psi_b.col(0);
    p.g_w = g_w.col(0);
    p.g_b = g_b.col(0);
    return p;
  }

  static AdapterParams zeros(const AdapterConfig& cfg) {
    const int d = cfg.model_dim;
    const int dq = cfg.query_out_dim;
    AdapterParams p;
    p.q0 = Matrix<Scalar>::Zero(cfg.n_queries, d);
    p.wq = p.wk = p.wv = p.wo = Matrix<Scalar>::Zero(d, d);
    p.psi_w = Matrix<Scalar>::Zero(dq, d);
    p.psi_b = Vector<Scalar>::Zero(dq);
    p.g_w = Vector<Scalar>::Zero(dq);
    p.g_b = Vector<Scalar>::Zero(1);
    return p;
  }

  template <typename Fn>
  void visit(Fn&& fn) {
    fn("adapter.q0", q0);
    fn("adapter.wq", wq);
    fn("adapter.wk", wk);
    fn("adapter.wv", wv);
    fn("adapter.wo", wo);
    fn("adapter.psi_w", psi_w);
    fn("adapter.psi_b", psi_b);
    fn("adapter.g_w", g_w);
    fn("adapter.g_b", g_b);
  }
};

// --------------------------------------------------------------------------
// Fusion

/// X~ = X + [Z, X] W^T, applied independently to every token row.
template <typename Scalar>
Matrix<Scalar> fuse(const Matrix<Scalar>& x, const Matrix<Scalar>& z, const FusionParams<Scalar>& params) {
  if (x.rows() != z.rows() || x.cols() != z.cols()) fail(ErrorCode::ShapeMismatch, "fuse: X and Z shapes differ");
  const Eigen::Index d = x.cols();
  if (params.w.rows() != d || params.w.cols() != 2 * d) fail(ErrorCode::ShapeMismatch, "fuse: W must be d x 2d");
  Matrix<Scalar> out = x;
  out.noalias() += z * params.w.leftCols(d).transpose();
  out.noalias() += x * params.w.rightCols(d).transpose();
  return out;
}

template <typename Scalar>
TokenGrid<Scalar> fuse(const TokenGrid<Scalar>& x, const TokenGrid<Scalar>& z, const FusionParams<Scalar>& params) {
  return {x.grid_height, x.grid_width, fuse(x.tokens, z.tokens, params)};
}

template <typename Scalar>
struct FusionGrads {
  Matrix<Scalar> w;
  Matrix<Scalar> x;
  Matrix<Scalar> z;
};

template <typename Scalar>
FusionGrads<Scalar> fuse_backward(const Matrix<Scalar>& x, const Matrix<Scalar>& z,
                                  const FusionParams<Scalar>& params, const Matrix<Scalar>& d_fused) {
  const Eigen::Index d = x.cols();
  FusionGrads<Scalar> g;
  g.w.resize(d, 2 * d);
  g.w.leftCols(d).noalias() = d_fused.transpose() * z;
  g.w.rightCols(d).noalias() = d_fused.transpose() * x;
  g.z.noalias() = d_fused * params.w.leftCols(d);
  g.x = d_fused;
  g.x.noalias() += d_fused * params.w.rightCols(d);
  return g;
}

// --------------------------------------------------------------------------
// Adapter

template <typename Scalar>
void softmax_rows(Matrix<Scalar>& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Scalar mx = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - mx).exp();
    logits.row(i) /= logits.row(i).sum();
  }
}

/// Everything the backward pass needs from a forward evaluation.
template <typename Scalar>
struct AdapterForward {
  Matrix<Scalar> seq;                 // [H; X~], T x d
  Matrix<Scalar> q, k, v;             // projected queries / keys / values
  std::vector<Matrix<Scalar>> attn;   // per head, N x T, rows sum to 1
  Matrix<Scalar> heads_out;           // concatenated head outputs, N x d
  Matrix<Scalar> y;                   // N x d
  Matrix<Scalar> u;                   // N x d_q
  Vector<Scalar> s;                   // N scalars from g
  Mat4T<Scalar> pred = Mat4T<Scalar>::Zero();

  RawPose raw_pose() const { return RawPose(Mat4(pred.template cast<double>())); }
};

template <typename Scalar>
void check_adapter_shapes(const AdapterConfig& cfg, const AdapterParams<Scalar>& p) {
  const Eigen::Index d = cfg.model_dim, dq = cfg.query_out_dim;
  auto square = [d](const Matrix<Scalar>& m) { return m.rows() == d && m.cols() == d; };
  if (p.q0.rows() != cfg.n_queries || p.q0.cols() != d || !square(p.wq) || !square(p.wk) || !square(p.wv) ||
      !square(p.wo) || p.psi_w.rows() != dq || p.psi_w.cols() != d || p.psi_b.size() != dq ||
      p.g_w.size() != dq || p.g_b.size() != 1)
    fail(ErrorCode::ShapeMismatch, "adapter parameters do not match the adapter config");
}

/// Y = MHA(Q0, [H; X~], [H; X~]); U = psi(Y); pred = reshape_rowmajor(g(U)).
template <typename Scalar>
AdapterForward<Scalar> adapter_forward(const Matrix<Scalar>& text, const Matrix<Scalar>& visual,
                                       const AdapterConfig& cfg, const AdapterParams<Scalar>& p) {
  cfg.validate();
  check_adapter_shapes(cfg, p);
  const Eigen::Index d = cfg.model_dim;
  if (text.cols() != d || visual.cols() != d) fail(ErrorCode::ShapeMismatch, "adapter: token width != model_dim");
  if (text.rows() + visual.rows() < 1) fail(ErrorCode::ShapeMismatch, "adapter: empty key sequence");

  AdapterForward<Scalar> f;
  f.seq.resize(text.rows() + visual.rows(), d);
  f.seq.topRows(text.rows()) = text;
  f.seq.bottomRows(visual.rows()) = visual;

  f.q.noalias() = p.q0 * p.wq.transpose();
  f.k.noalias() = f.seq * p.wk.transpose();
  f.v.noalias() = f.seq * p.wv.transpose();

  const int dh = cfg.head_dim();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  f.heads_out.resize(cfg.n_queries, d);
  f.attn.resize(cfg.heads);
  for (int h = 0; h < cfg.heads; ++h) {
    Matrix<Scalar> logits = f.q.middleCols(h * dh, dh) * f.k.middleCols(h * dh, dh).transpose() * scale;
    softmax_rows(logits);
    f.heads_out.middleCols(h * dh, dh).noalias() = logits * f.v.middleCols(h * dh, dh);
    f.attn[h] = std::move(logits);
  }
  f.y.noalias() = f.heads_out * p.wo.transpose();
  f.u.noalias() = f.y * p.psi_w.transpose();
  f.u.rowwise() += p.psi_b.transpose();
  f.s = f.u * p.g_w;
  f.s.array() += p.g_b(0);
  if (cfg.pose_output)
    for (int i = 0; i < 16; ++i) f.pred(i / 4, i % 4) = f.s(i);
  return f;
}

template <typename Scalar>
struct AdapterGrads {
  AdapterParams<Scalar> params;
  Matrix<Scalar> text;
  Matrix<Scalar> visual;
};

/// Chain rule from dL/dpred back to every adapter parameter and input token.
template <typename Scalar>
AdapterGrads<Scalar> adapter_backward(const AdapterForward<Scalar>& f, const AdapterConfig& cfg,
                                      const AdapterParams<Scalar>& p, const Mat4T<Scalar>& d_pred,
                                      Eigen::Index text_rows) {
  AdapterGrads<Scalar> g;
  Vector<Scalar> ds(cfg.n_queries);
  for (int i = 0; i < cfg.n_queries; ++i) ds(i) = d_pred(i / 4, i % 4);

  auto& gp = g.params;
  gp.g_w.noalias() = f.u.transpose() * ds;
  gp.g_b = Vector<Scalar>::Constant(1, ds.sum());
  const Matrix<Scalar> du = ds * p.g_w.transpose();

  gp.psi_w.noalias() = du.transpose() * f.y;
  gp.psi_b = du.colwise().sum().transpose();
  const Matrix<Scalar> dy = du * p.psi_w;

  gp.wo.noalias() = dy.transpose() * f.heads_out;
  const Matrix<Scalar> d_heads = dy * p.wo;

  const int dh = cfg.head_dim();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  Matrix<Scalar> dq = Matrix<Scalar>::Zero(f.q.rows(), f.q.cols());
  Matrix<Scalar> dk = Matrix<Scalar>::Zero(f.k.rows(), f.k.cols());
  Matrix<Scalar> dv = Matrix<Scalar>::Zero(f.v.rows(), f.v.cols());
  for (int h = 0; h < cfg.heads; ++h) {
    const Matrix<Scalar>& a = f.attn[h];
    const auto d_out = d_heads.middleCols(h * dh, dh);
    const Matrix<Scalar> da = d_out * f.v.middleCols(h * dh, dh).transpose();
    dv.middleCols(h * dh, dh).noalias() = a.transpose() * d_out;
    // Softmax Jacobian: dlogits = A .* (dA - rowsum(A .* dA)).
    const Vector<Scalar> row_dot = (a.array() * da.array()).rowwise().sum();
    Matrix<Scalar> dlogits = (a.array() * (da.colwise() - row_dot).array()).matrix();
    dlogits *= scale;
    dq.middleCols(h * dh, dh).noalias() = dlogits * f.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh).noalias() = dlogits.transpose() * f.q.middleCols(h * dh, dh);
  }

  gp.wq.noalias() = dq.transpose() * p.q0;
  gp.q0.noalias() = dq * p.wq;
  gp.wk.noalias() = dk.transpose() * f.seq;
  gp.wv.noalias() = dv.transpose() * f.seq;
  Matrix<Scalar> dseq = dk * p.wk;
  dseq.noalias() += dv * p.wv;
  g.text = dseq.topRows(text_rows);
  g.visual = dseq.bottomRows(dseq.rows() - text_rows);
  return g;
}

// --------------------------------------------------------------------------
// Losses

/// Mean squared error over the 3 translation entries plus mean squared error
/// over the 9 rotation entries. The bottom row is not part of the loss.
template <typename Scalar>
Scalar pose_loss(const Mat4T<Scalar>& pred, const Mat4T<Scalar>& gt) {
  const auto diff = (pred - gt).eval();
  const Scalar trans = diff.template topRightCorner<3, 1>().squaredNorm() / Scalar(3);
  const Scalar rot = diff.template topLeftCorner<3, 3>().squaredNorm() / Scalar(9);
  return trans + rot;
}

inline double pose_loss(const RawPose& pred, const CameraPose& gt) {
  return pose_loss<double>(pred.matrix(), gt.matrix());
}

template <typename Scalar>
Mat4T<Scalar> pose_loss_grad(const Mat4T<Scalar>& pred, const Mat4T<Scalar>& gt) {
  Mat4T<Scalar> g = Mat4T<Scalar>::Zero();
  const auto diff = (pred - gt).eval();
  g.template topLeftCorner<3, 3>() = diff.template topLeftCorner<3, 3>() * (Scalar(2) / Scalar(9));
  g.template topRightCorner<3, 1>() = diff.template topRightCorner<3, 1>() * (Scalar(2) / Scalar(3));
  return g;
}

inline double total_loss(double lang_loss, double pose_loss_value, const LossConfig& cfg = {}) {
  return cfg.lambda_lang * lang_loss + cfg.lambda_pose * pose_loss_value;
}

// --------------------------------------------------------------------------
// Full pose branch: ray-patch embedding -> fusion -> adapter -> pose.

template <typename Scalar = double>
struct PoseNetParams {
  EmbedParams<Scalar> embed;
  FusionParams<Scalar> fusion;
  AdapterParams<Scalar> adapter;

  static PoseNetParams init(int patch_features, const AdapterConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 seeder(seed);
    PoseNetParams p;
    std::mt19937_64 rng(seeder());
    p.embed.weight.resize(cfg.model_dim, patch_features);
    Matrix<Scalar> b(cfg.model_dim, 1);
    fill_uniform_fan_in(p.embed.weight, patch_features, rng);
    fill_uniform_fan_in(b, patch_features, rng);
    p.embed.bias = b.col(0);
    p.fusion = FusionParams<Scalar>::init(cfg.model_dim, seeder());
    p.adapter = AdapterParams<Scalar>::init(cfg, seeder());
    return p;
  }

  static PoseNetParams zeros_like(const PoseNetParams& o) {
    PoseNetParams z = o;
    z.visit([](const char*, auto& m) { m.setZero(); });
    return z;
  }

  template <typename Fn>
  void visit(Fn&& fn) {
    fn("embed.weight", embed.weight);
    fn("embed.bias", embed.bias);
    fusion.visit(fn);
    adapter.visit(fn);
  }

  // fn(name, this_tensor, other_tensor) over matching tensors of two
  // identically shaped parameter sets (e.g. values and their gradients).
  template <typename Fn>
  void visit_with(const PoseNetParams& o, Fn&& fn) {
    fn("embed.weight", embed.weight, o.embed.weight);
    fn("embed.bias", embed.bias, o.embed.bias);
    fn("fusion.w", fusion.w, o.fusion.w);
    fn("adapter.q0", adapter.q0, o.adapter.q0);
    fn("adapter.wq", adapter.wq, o.adapter.wq);
    fn("adapter.wk", adapter.wk, o.adapter.wk);
    fn("adapter.wv", adapter.wv, o.adapter.wv);
    fn("adapter.wo", adapter.wo, o.adapter.wo);
    fn("adapter.psi_w", adapter.psi_w, o.adapter.psi_w);
    fn("adapter.psi_b", adapter.psi_b, o.adapter.psi_b);
    fn("adapter.g_w", adapter.g_w, o.adapter.g_w);
    fn("adapter.g_b", adapter.g_b, o.adapter.g_b);
  }
};

/// One training/eval example: flattened ray patches and visual tokens for all
/// context views stacked row-wise, plus text hidden states.
template <typename Scalar = double>
struct PoseSample {
  Matrix<Scalar> ray_patches;  // T_vis x 6p^2
  Matrix<Scalar> visual;       // T_vis x d
  Matrix<Scalar> text;         // T_text x d
};

template <typename Scalar>
struct PoseNetForward {
  Matrix<Scalar> camera_tokens;  // Z
  Matrix<Scalar> fused;          // X~
  AdapterForward<Scalar> adapter;
};

template <typename Scalar>
PoseNetForward<Scalar> pose_net_forward(const PoseSample<Scalar>& sample, const PoseNetParams<Scalar>& params,
                                        const AdapterConfig& cfg) {
  if (sample.ray_patches.cols() != params.embed.weight.cols())
    fail(ErrorCode::ShapeMismatch, "ray patch width does not match embedding");
  if (sample.ray_patches.rows() != sample.visual.rows())
    fail(ErrorCode::ShapeMismatch, "ray patch rows must match visual token rows");
  PoseNetForward<Scalar> f;
  f.camera_tokens.noalias() = sample.ray_patches * params.embed.weight.transpose();
  f.camera_tokens.rowwise() += params.embed.bias.transpose();
  f.fused = fuse(sample.visual, f.camera_tokens, params.fusion);
  f.adapter = adapter_forward(sample.text, f.fused, cfg, params.adapter);
  return f;
}

template <typename Scalar>
struct PoseNetGrads {
  PoseNetParams<Scalar> params;
  Matrix<Scalar> visual;
  Matrix<Scalar> text;
  Matrix<Scalar> ray_patches;
};

/// Gradients of upstream * L with L = total_loss(0, pose_loss(pred, gt)).
template <typename Scalar>
PoseNetGrads<Scalar> pose_net_backward(const PoseSample<Scalar>& sample, const PoseNetParams<Scalar>& params,
                                       const AdapterConfig& cfg, const PoseNetForward<Scalar>& f,
                                       const Mat4T<Scalar>& gt, const LossConfig& loss_cfg,
                                       Scalar upstream = Scalar(1)) {
  const Mat4T<Scalar> d_pred =
      pose_loss_grad(f.adapter.pred, gt) * (upstream * static_cast<Scalar>(loss_cfg.lambda_pose));
  AdapterGrads<Scalar> ag = adapter_backward(f.adapter, cfg, params.adapter, d_pred, sample.text.rows());
  FusionGrads<Scalar> fg = fuse_backward(sample.visual, f.camera_tokens, params.fusion, ag.visual);

  PoseNetGrads<Scalar> g;
  g.params.adapter = std::move(ag.params);
  g.params.fusion.w = std::move(fg.w);
  g.params.embed.weight.noalias() = fg.z.transpose() * sample.ray_patches;
  g.params.embed.bias = fg.z.colwise().sum().transpose();
  g.text = std::move(ag.text);
  g.visual = std::move(fg.x);
  g.ray_patches.noalias() = fg.z * params.embed.weight;
  return g;
}

template <typename Scalar>
Scalar pose_net_loss(const PoseSample<Scalar>& sample, const PoseNetParams<Scalar>& params,
                     const AdapterConfig& cfg, const Mat4T<Scalar>& gt, const LossConfig& loss_cfg) {
  const auto f = pose_net_forward(sample, params, cfg);
  return static_cast<Scalar>(loss_cfg.lambda_pose) * pose_loss(f.adapter.pred, gt);
}

// --------------------------------------------------------------------------
// Finite-difference gradient check

struct GradCheckDims {
  int tokens = 0;       // visual tokens per view (S); 0 draws at random
  int dim = 0;          // model width d; 0 draws at random
  int heads = 0;
  int text_tokens = 0;
  int views = 0;
};

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t count = 0;
};

struct GradCheckReport {
  std::uint64_t seed = 0;
  int tokens = 0, dim = 0, heads = 0, text_tokens = 0, views = 0, query_out_dim = 0;
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
};

inline constexpr double kGradCheckStep = 1e-5;
// Relative error is |a - n| / max(|a|, |n|, floor).
inline constexpr double kGradCheckFloor = 1e-6;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
}

/// Compares analytic gradients of every parameter and input against central
/// differences on a random small problem.
inline GradCheckReport grad_check(std::uint64_t seed, GradCheckDims dims = {}) {
  std::mt19937_64 rng(seed);
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  GradCheckReport rep;
  rep.seed = seed;
  rep.tokens = dims.tokens > 0 ? dims.tokens : pick(1, 8);
  const int head_choices[] = {1, 2, 4};
  rep.heads = dims.heads > 0 ? dims.heads : head_choices[pick(0, 2)];
  if (dims.dim > 0) {
    rep.dim = dims.dim;
  } else {
    const int max_mult = 16 / rep.heads;
    rep.dim = rep.heads * pick(std::max(1, 4 / rep.heads), max_mult);
  }
  rep.text_tokens = dims.text_tokens > 0 ? dims.text_tokens : pick(1, 4);
  rep.views = dims.views > 0 ? dims.views : pick(1, 2);
  rep.query_out_dim = pick(2, 8);

  AdapterConfig cfg;
  cfg.model_dim = rep.dim;
  cfg.heads = rep.heads;
  cfg.query_out_dim = rep.query_out_dim;
  cfg.validate();
  const LossConfig loss_cfg;
  const int patch_features = kRayChannels * 4;  // 2x2 ray patches

  PoseNetParams<double> params = PoseNetParams<double>::init(patch_features, cfg, rng());
  std::normal_distribution<double> normal(0.0, 1.0);
  auto randn = [&](Eigen::Index r, Eigen::Index c) {
    Matrix<double> m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
    return m;
  };
  PoseSample<double> sample;
  const int t_vis = rep.tokens * rep.views;
  sample.ray_patches = randn(t_vis, patch_features);
  sample.visual = randn(t_vis, rep.dim);
  sample.text = randn(rep.text_tokens, rep.dim);
  const Mat3 r = rotation_about_axis(Vec3(normal(rng), normal(rng), normal(rng)), normal(rng));
  const Mat4 gt = recompose(r, Vec3(normal(rng), normal(rng), normal(rng)));

  const auto fwd = pose_net_forward(sample, params, cfg);
  const auto grads = pose_net_backward(sample, params, cfg, fwd, gt, loss_cfg);

  auto check = [&](const std::string& name, auto& values, const auto& analytic) {
    GradCheckEntry e{name, 0.0, 0};
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double orig = values.data()[i];
      values.data()[i] = orig + kGradCheckStep;
      const double up = pose_net_loss(sample, params, cfg, gt, loss_cfg);
      values.data()[i] = orig - kGradCheckStep;
      const double down = pose_net_loss(sample, params, cfg, gt, loss_cfg);
      values.data()[i] = orig;
      const double numeric = (up - down) / (2.0 * kGradCheckStep);
      e.max_rel_error = std::max(e.max_rel_error, relative_error(analytic.data()[i], numeric));
      ++e.count;
    }
    rep.max_rel_error = std::max(rep.max_rel_error, e.max_rel_error);
    rep.entries.push_back(std::move(e));
  };

  params.visit_with(grads.params, [&](const char* name, auto& value, const auto& analytic) {
    check(name, value, analytic);
  });
  check("input.visual", sample.visual, grads.visual);
  check("input.text", sample.text, grads.text);
  check("input.ray_patches", sample.ray_patches, grads.ray_patches);
  return rep;
}

}  // namespace camcue
