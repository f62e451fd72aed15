#pragma once

// Self-contained training demo for the pose branch on synthetic scenes.
//
// Each sample: a random target camera in a box room, 4 context cameras drawn
// from an orbit pool, camera tokens from the contexts' ray maps, visual tokens
// from fixed random features of the contexts' rendered depth, and text tokens
// carrying a sinusoidal code of the target translation and Euler angles plus
// noise. Only the pose loss is optimized; the language term is fed as 0.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "camcue/camera.hpp"
#include "camcue/error.hpp"
#include "camcue/plucker.hpp"
#include "camcue/pose_eval.hpp"
#include "camcue/pose_net.hpp"
#include "camcue/synth_scene.hpp"

namespace camcue {

inline constexpr int text_code_dims(int tokens) { return 3 * tokens; }

struct TrainConfig {
  std::uint64_t seed = 0;
  int steps = 2000;
  double lr = 3e-3;
  int batch_size = 16;
  int train_samples = 256;
  int heldout_samples = 64;
  int log_every = 50;
  int obstacles = 4;
  int context_pool = 8;
  int views = 4;
  int text_tokens = 16;
  double text_noise = 0.02;
  double text_scale = 3.0;
  double visual_scale = 0.25;
  int image_width = 32;
  int image_height = 24;
  PatchConfig patch{16, 16, 8, 48};
  AdapterConfig adapter{16, 4, 48, 32, true};
  LossConfig loss{};

  void validate() const {
    if (steps < 0) fail(ErrorCode::ConfigError, "steps must be >= 0");
    if (!(lr > 0.0)) fail(ErrorCode::ConfigError, "lr must be > 0");
    if (batch_size < 1 || train_samples < 1 || heldout_samples < 1 || log_every < 1)
      fail(ErrorCode::ConfigError, "batch, sample counts and log_every must be >= 1");
    if (views < 1 || context_pool < views) fail(ErrorCode::ConfigError, "need 1 <= views <= context_pool");
    if (text_tokens < 1) fail(ErrorCode::ConfigError, "text_tokens must be >= 1");
    if (adapter.model_dim < text_code_dims(text_tokens))
      fail(ErrorCode::ConfigError, "model_dim must be >= 3 * text_tokens");
    if (image_width < 1 || image_height < 1) fail(ErrorCode::ConfigError, "image size must be positive");
    patch.validate();
    adapter.validate();
    loss.validate();
    if (patch.token_dim != adapter.model_dim) fail(ErrorCode::ConfigError, "patch token_dim must equal model_dim");
  }
};

struct TrainingLogEntry {
  int step = 0;
  double train_pose_loss = 0.0;
  double train_total_loss = 0.0;
  double heldout_pose_loss = 0.0;
  double heldout_median_rot_deg = 0.0;
  double heldout_median_trans = 0.0;
};

struct TrainingReport {
  std::vector<TrainingLogEntry> log;
  PoseAccuracyReport final_accuracy;
};

namespace detail {

struct DemoSample {
  PoseSample<double> inputs;
  Mat4 gt;
};

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline constexpr int kTextBlock = 3;
inline constexpr double kTransFreq = 0.3;

// Stand-in for language hidden states. Token j carries a sinusoidal code of
// pose parameter j mod 6 (tx, ty, tz, yaw, pitch, roll) in its own block of
// model dims: scale * (sin, cos, 1). Every dim gets seeded Gaussian noise.
inline Matrix<double> text_code(const Vec3& t, double yaw, double pitch, double roll, int tokens, int dim,
                                double scale, double noise, std::mt19937_64& rng) {
  const double params[6] = {kTransFreq * t.x(), kTransFreq * t.y(), kTransFreq * t.z(), yaw, pitch, roll};
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix<double> h = Matrix<double>::Zero(tokens, dim);
  for (int j = 0; j < tokens; ++j) {
    const double a = params[j % 6];
    h(j, kTextBlock * j) = scale * std::sin(a);
    h(j, kTextBlock * j + 1) = scale * std::cos(a);
    h(j, kTextBlock * j + 2) = scale;
  }
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] += noise * n01(rng);
  return h;
}

struct DemoWorld {
  Scene scene;
  CameraIntrinsics intrinsics;
  std::vector<Matrix<double>> pool_ray_patches;  // per pool camera, S x 6p^2
  std::vector<Matrix<double>> pool_visual;       // per pool camera, S x d
};

inline DemoWorld make_world(const TrainConfig& cfg) {
  DemoWorld w;
  w.scene = make_scene(cfg.seed, cfg.obstacles);
  w.intrinsics = default_synth_intrinsics(cfg.image_width, cfg.image_height);
  const Trajectory pool = sample_trajectory(w.scene, cfg.context_pool, cfg.seed + 1, TrajectoryPattern::Orbit);
  const int p = cfg.patch.patch_size;
  const int d = cfg.adapter.model_dim;

  // Frozen random "backbone": tanh of a fixed projection of each depth patch.
  std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
  Matrix<double> proj(d, p * p);
  fill_uniform_fan_in(proj, 1, rng);
  for (const auto& cam : pool) {
    const RayMap native = ray_map(cam.pose, w.intrinsics, cfg.image_width, cfg.image_height);
    w.pool_ray_patches.push_back(patch_matrix<double>(resize_ray_map(native, cfg.patch), cfg.patch));
    const DepthMap depth =
        render_depth(w.scene, cam.pose, w.intrinsics, cfg.patch.canonical_width, cfg.patch.canonical_height);
    Matrix<double> vis(cfg.patch.num_tokens(), d);
    for (int pr = 0; pr < cfg.patch.grid_height(); ++pr) {
      for (int pc = 0; pc < cfg.patch.grid_width(); ++pc) {
        Vector<double> patch(p * p);
        for (int r = 0; r < p; ++r)
          for (int c = 0; c < p; ++c) patch(r * p + c) = depth.at(pc * p + c, pr * p + r) / 3.0 - 1.0;
        vis.row(pr * cfg.patch.grid_width() + pc) =
            cfg.visual_scale * (proj * patch).array().tanh().matrix().transpose();
      }
    }
    w.pool_visual.push_back(std::move(vis));
  }
  return w;
}

inline DemoSample make_sample(const DemoWorld& w, const TrainConfig& cfg, std::mt19937_64& rng) {
  auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  Vec3 eye;
  do {
    eye = Vec3(uni(w.scene.room.min.x(), w.scene.room.max.x()), uni(w.scene.room.min.y(), w.scene.room.max.y()),
               uni(1.2, 1.8));
  } while (!w.scene.is_free(eye, 0.3));
  const double yaw = uni(-std::numbers::pi, std::numbers::pi);
  const double pitch = uni(-15.0, 5.0) * kDegToRad;
  const Vec3 forward(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch));
  const CameraPose target = look_at(eye, eye + forward);

  std::vector<int> ids(w.pool_visual.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(cfg.views);

  const Eigen::Index s = cfg.patch.num_tokens();
  DemoSample out;
  out.inputs.ray_patches.resize(s * cfg.views, cfg.patch.patch_features());
  out.inputs.visual.resize(s * cfg.views, cfg.adapter.model_dim);
  for (int v = 0; v < cfg.views; ++v) {
    out.inputs.ray_patches.middleRows(v * s, s) = w.pool_ray_patches[ids[v]];
    out.inputs.visual.middleRows(v * s, s) = w.pool_visual[ids[v]];
  }
  out.inputs.text = text_code(eye, yaw, pitch, 0.0, cfg.text_tokens, cfg.adapter.model_dim, cfg.text_scale,
                                   cfg.text_noise, rng);
  out.gt = target.matrix();
  return out;
}

inline Eigen::VectorXd pack(PoseNetParams<double>& p) {
  std::vector<double> flat;
  p.visit([&](const char*, auto& m) { flat.insert(flat.end(), m.data(), m.data() + m.size()); });
  return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

inline void unpack(PoseNetParams<double>& p, const Eigen::VectorXd& flat) {
  Eigen::Index off = 0;
  p.visit([&](const char*, auto& m) {
    std::copy(flat.data() + off, flat.data() + off + m.size(), m.data());
    off += m.size();
  });
}

struct Evaluation {
  double pose_loss = 0.0;
  double median_rot = 0.0;
  double median_trans = 0.0;
  std::vector<PoseErrorSample> errors;
};

inline Evaluation evaluate(const std::vector<DemoSample>& set, const PoseNetParams<double>& params,
                           const AdapterConfig& cfg) {
  Evaluation e;
  std::vector<double> rot, trans;
  for (const auto& s : set) {
    const auto f = pose_net_forward(s.inputs, params, cfg);
    e.pose_loss += pose_loss<double>(f.adapter.pred, s.gt);
    if (!f.adapter.pred.allFinite()) {
      e.pose_loss = std::numeric_limits<double>::quiet_NaN();
      return e;
    }
    const CameraPose gt = CameraPose::from_matrix(s.gt, 1e-6);
    PoseErrorSample err;
    try {
      err = pose_errors(f.adapter.raw_pose(), gt);
    } catch (const Error& ex) {
      if (ex.code() != ErrorCode::SingularRotation) throw;
      err.rot_err_deg = 180.0;
      err.trans_err = (f.adapter.pred.topRightCorner<3, 1>() - s.gt.topRightCorner<3, 1>()).norm();
    }
    rot.push_back(err.rot_err_deg);
    trans.push_back(err.trans_err);
    e.errors.push_back(err);
  }
  e.pose_loss /= static_cast<double>(set.size());
  e.median_rot = median(rot);
  e.median_trans = median(trans);
  return e;
}

}  // namespace detail

/// Trains embedding, fusion and adapter parameters with Adam on the pose
/// loss. Deterministic per config.
inline TrainingReport train_adapter_demo(const TrainConfig& cfg) {
  cfg.validate();
  const detail::DemoWorld world = detail::make_world(cfg);
  std::mt19937_64 data_rng(cfg.seed + 2);
  std::vector<detail::DemoSample> train, heldout;
  for (int i = 0; i < cfg.train_samples; ++i) train.push_back(detail::make_sample(world, cfg, data_rng));
  for (int i = 0; i < cfg.heldout_samples; ++i) heldout.push_back(detail::make_sample(world, cfg, data_rng));

  PoseNetParams<double> params = PoseNetParams<double>::init(cfg.patch.patch_features(), cfg.adapter, cfg.seed + 3);
  // Zero-initialized fusion residual: training starts from X~ = X.
  params.fusion = FusionParams<double>::zeros(cfg.adapter.model_dim);
  Eigen::VectorXd theta = detail::pack(params);
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;

  TrainingReport report;
  auto log_step = [&](int step) {
    const auto tr = detail::evaluate(train, params, cfg.adapter);
    const auto ho = detail::evaluate(heldout, params, cfg.adapter);
    if (!std::isfinite(tr.pose_loss) || !std::isfinite(ho.pose_loss))
      fail(ErrorCode::DivergedLoss, "non-finite loss at step " + std::to_string(step));
    report.log.push_back({step, tr.pose_loss, total_loss(0.0, tr.pose_loss, cfg.loss), ho.pose_loss, ho.median_rot,
                          ho.median_trans});
    return ho;
  };
  auto last = log_step(0);

  std::mt19937_64 batch_rng(cfg.seed + 4);
  std::uniform_int_distribution<int> pick(0, cfg.train_samples - 1);
  for (int step = 1; step <= cfg.steps; ++step) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
    double batch_loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const auto& s = train[pick(batch_rng)];
      const auto f = pose_net_forward(s.inputs, params, cfg.adapter);
      batch_loss += pose_loss<double>(f.adapter.pred, s.gt);
      auto g = pose_net_backward(s.inputs, params, cfg.adapter, f, s.gt, cfg.loss);
      grad += detail::pack(g.params);
    }
    grad /= cfg.batch_size;
    if (!std::isfinite(batch_loss) || !grad.allFinite())
      fail(ErrorCode::DivergedLoss, "non-finite loss at step " + std::to_string(step));

    m1 = kBeta1 * m1 + (1.0 - kBeta1) * grad;
    m2 = kBeta2 * m2 + (1.0 - kBeta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(kBeta1, step);
    const double c2 = 1.0 - std::pow(kBeta2, step);
    theta.array() -= cfg.lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + kAdamEps);
    detail::unpack(params, theta);

    if (step % cfg.log_every == 0 || step == cfg.steps) last = log_step(step);
  }
  report.final_accuracy = accuracy_report(last.errors);
  return report;
}

inline TrainingReport train_adapter_demo(std::uint64_t seed, int steps, double lr, TrainConfig cfg = {}) {
  cfg.seed = seed;
  cfg.steps = steps;
  cfg.lr = lr;
  return train_adapter_demo(cfg);
}

inline nlohmann::ordered_json to_json(const TrainingLogEntry& e) {
  nlohmann::ordered_json j;
  j["type"] = "step";
  j["step"] = e.step;
  j["train_pose_loss"] = e.train_pose_loss;
  j["train_total_loss"] = e.train_total_loss;
  j["heldout_pose_loss"] = e.heldout_pose_loss;
  j["heldout_median_rot_deg"] = e.heldout_median_rot_deg;
  j["heldout_median_trans"] = e.heldout_median_trans;
  return j;
}

/// One "step" line per log entry, then a "summary" line with the final
/// held-out accuracy report.
inline std::string to_jsonl(const TrainingReport& r) {
  std::string out;
  for (const auto& e : r.log) out += to_json(e).dump() + "\n";
  nlohmann::ordered_json summary;
  summary["type"] = "summary";
  summary["steps"] = r.log.empty() ? 0 : r.log.back().step;
  summary["initial_train_pose_loss"] = r.log.empty() ? 0.0 : r.log.front().train_pose_loss;
  summary["final_train_pose_loss"] = r.log.empty() ? 0.0 : r.log.back().train_pose_loss;
  summary["heldout_accuracy"] = to_json(r.final_accuracy);
  out += summary.dump() + "\n";
  return out;
}

}  // namespace camcue
