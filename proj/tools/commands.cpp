#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <initializer_list>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "camcue/camera.hpp"
#include "camcue/dataset_io.hpp"
#include "camcue/error.hpp"
#include "camcue/parallel.hpp"
#include "camcue/pose_eval.hpp"
#include "camcue/synth_scene.hpp"
#include "png_depth.hpp"

namespace camcue::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// --------------------------------------------------------------------------
// RunConfig

namespace {

void check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(ErrorCode::ConfigError, "config section '" + section + "' must be an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) fail(ErrorCode::ConfigError, "unknown config key '" + section + item.key() + "'");
  }
}

template <typename T>
void take(const json& obj, const char* key, T& dst, const std::string& section) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::ConfigError, "config key '" + section + key + "' has the wrong type");
  }
}

template <typename T>
void take_opt(const json& obj, const char* key, std::optional<T>& dst, const std::string& section) {
  if (!obj.contains(key)) return;
  T v{};
  take(obj, key, v, section);
  dst = v;
}

void parse_patch(const json& j, PatchConfig& p, const std::string& section) {
  check_keys(j, section, {"canonical_width", "canonical_height", "patch_size", "token_dim"});
  take(j, "canonical_width", p.canonical_width, section);
  take(j, "canonical_height", p.canonical_height, section);
  take(j, "patch_size", p.patch_size, section);
  take(j, "token_dim", p.token_dim, section);
}

void parse_adapter(const json& j, AdapterConfig& a, const std::string& section) {
  check_keys(j, section, {"n_queries", "heads", "model_dim", "query_out_dim", "pose_output"});
  take(j, "n_queries", a.n_queries, section);
  take(j, "heads", a.heads, section);
  take(j, "model_dim", a.model_dim, section);
  take(j, "query_out_dim", a.query_out_dim, section);
  take(j, "pose_output", a.pose_output, section);
}

void parse_selection(const json& j, SelectionConfig& s) {
  const std::string sec = "selection.";
  check_keys(j, sec,
             {"d_min", "d_max", "distinct_d", "distinct_theta_deg", "k", "gamma", "tau_t", "tau_theta_deg",
              "epsilon", "sample_stride", "distinctness"});
  take(j, "d_min", s.d_min, sec);
  take(j, "d_max", s.d_max, sec);
  take(j, "distinct_d", s.distinct_d, sec);
  take(j, "distinct_theta_deg", s.distinct_theta_deg, sec);
  take(j, "k", s.k, sec);
  take(j, "gamma", s.gamma, sec);
  take(j, "tau_t", s.tau_t, sec);
  take(j, "tau_theta_deg", s.tau_theta_deg, sec);
  take(j, "epsilon", s.epsilon, sec);
  take(j, "sample_stride", s.sample_stride, sec);
  if (j.contains("distinctness")) {
    std::string mode;
    take(j, "distinctness", mode, sec);
    if (mode == "target")
      s.distinctness = DistinctnessMode::TargetRelative;
    else if (mode == "pairwise")
      s.distinctness = DistinctnessMode::CandidatePairwise;
    else
      fail(ErrorCode::ConfigError, "selection.distinctness must be \"target\" or \"pairwise\"");
  }
}

void parse_train(const json& j, TrainConfig& t) {
  const std::string sec = "train.";
  check_keys(j, sec,
             {"steps", "lr", "batch_size", "train_samples", "heldout_samples", "log_every", "obstacles",
              "context_pool", "views", "text_tokens", "text_noise", "text_scale", "visual_scale", "image_width",
              "image_height", "patch", "adapter"});
  take(j, "steps", t.steps, sec);
  take(j, "lr", t.lr, sec);
  take(j, "batch_size", t.batch_size, sec);
  take(j, "train_samples", t.train_samples, sec);
  take(j, "heldout_samples", t.heldout_samples, sec);
  take(j, "log_every", t.log_every, sec);
  take(j, "obstacles", t.obstacles, sec);
  take(j, "context_pool", t.context_pool, sec);
  take(j, "views", t.views, sec);
  take(j, "text_tokens", t.text_tokens, sec);
  take(j, "text_noise", t.text_noise, sec);
  take(j, "text_scale", t.text_scale, sec);
  take(j, "visual_scale", t.visual_scale, sec);
  take(j, "image_width", t.image_width, sec);
  take(j, "image_height", t.image_height, sec);
  if (j.contains("patch")) parse_patch(j.at("patch"), t.patch, sec + "patch.");
  if (j.contains("adapter")) parse_adapter(j.at("adapter"), t.adapter, sec + "adapter.");
}

}  // namespace

void RunConfig::validate() const {
  if (threads && *threads < 1) fail(ErrorCode::ConfigError, "threads must be >= 1");
  selection.validate();
  patch.validate();
  adapter.validate();
  loss.validate();
  if (patch.token_dim != adapter.model_dim) fail(ErrorCode::ConfigError, "patch.token_dim must equal adapter.model_dim");
  TrainConfig t = train;
  t.seed = seed;
  t.loss = loss;
  t.validate();
}

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  check_keys(j, "", {"seed", "threads", "selection", "patch", "adapter", "loss", "train", "paths"});
  take(j, "seed", c.seed, "");
  take_opt(j, "threads", c.threads, "");
  if (j.contains("selection")) parse_selection(j.at("selection"), c.selection);
  if (j.contains("patch")) parse_patch(j.at("patch"), c.patch, "patch.");
  if (j.contains("adapter")) parse_adapter(j.at("adapter"), c.adapter, "adapter.");
  if (j.contains("loss")) {
    const json& l = j.at("loss");
    check_keys(l, "loss.", {"lambda_lang", "lambda_pose"});
    take(l, "lambda_lang", c.loss.lambda_lang, "loss.");
    take(l, "lambda_pose", c.loss.lambda_pose, "loss.");
  }
  if (j.contains("train")) parse_train(j.at("train"), c.train);
  if (j.contains("paths")) {
    const json& p = j.at("paths");
    check_keys(p, "paths.", {"scene_dir", "out", "pred", "gt"});
    take_opt(p, "scene_dir", c.scene_dir, "paths.");
    take_opt(p, "out", c.out, "paths.");
    take_opt(p, "pred", c.pred, "paths.");
    take_opt(p, "gt", c.gt, "paths.");
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  const json j = json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::ConfigError, path.string() + ": not valid JSON");
  return parse_run_config(j);
}

int resolve_threads(std::optional<int> flag, const RunConfig& cfg) {
  if (flag) {
    if (*flag < 1) fail(ErrorCode::ConfigError, "--threads must be >= 1");
    return *flag;
  }
  if (cfg.threads) return *cfg.threads;
  return default_thread_count();
}

// --------------------------------------------------------------------------
// Commands

namespace {

struct Common {
  std::string config;
  std::optional<int> threads;

  RunConfig load() const { return config.empty() ? RunConfig{} : load_run_config(config); }
};

std::string require_path(const std::string& flag_value, const std::optional<std::string>& from_config,
                         const char* name) {
  if (!flag_value.empty()) return flag_value;
  if (from_config) return *from_config;
  fail(ErrorCode::ConfigError, std::string("missing required option --") + name);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// --- synth

struct SynthArgs {
  Common common;
  std::uint64_t seed = 0;
  int frames = 24;
  int obstacles = 4;
  std::string out;
  std::string pattern = "orbit";
  int width = 80;
  int height = 60;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const RunConfig cfg = a.common.load();
  const int threads = resolve_threads(a.common.threads, cfg);
  if (a.frames < 0) fail(ErrorCode::ConfigError, "--frames must be >= 0");
  const std::string dir = require_path(a.out, cfg.out, "out");
  const TrajectoryPattern pattern = a.pattern == "orbit" ? TrajectoryPattern::Orbit : TrajectoryPattern::RandomWalk;
  const Scene scene = make_scene(a.seed, a.obstacles);
  const CameraIntrinsics k = default_synth_intrinsics(a.width, a.height);
  const Trajectory traj = sample_trajectory(scene, a.frames, a.seed + 1, pattern);
  const auto frames = render_frames(scene, traj, k, threads);
  io::write_scene_dir(dir, k, frames, &scene);
  out << "synth: " << frames.size() << " frames, " << scene.obstacles.size() << " obstacles -> " << dir << "\n";
  return kExitOk;
}

// --- select

struct SelectArgs {
  Common common;
  std::string scene_dir;
  std::string out;
};

int cmd_select(const SelectArgs& a, std::ostream& out) {
  const RunConfig cfg = a.common.load();
  const int threads = resolve_threads(a.common.threads, cfg);
  const auto dir = io::read_scene_dir(require_path(a.scene_dir, cfg.scene_dir, "scene-dir"), png_depth_fallback());
  const std::string manifest = require_path(a.out, cfg.out, "out");
  for (const auto& w : dir.warnings) out << "warning: " << w << "\n";
  const SelectionResult r = build_groups(dir.frames, cfg.selection, dir.name, threads);
  io::write_manifest(manifest, r.groups);
  const auto& s = r.stats;
  out << "scene " << dir.name << ": " << s.targets << " targets, " << s.accepted << " accepted, "
      << (s.targets - s.accepted) << " rejected\n";
  out << "rejected by reason:\n";
  out << "  pose-filter         " << s.pose_filter << "\n";
  out << "  too-few-candidates  " << s.too_few_candidates << "\n";
  out << "  no-samples          " << s.no_samples << "\n";
  out << "  coverage            " << s.coverage << "\n";
  out << "  redundancy          " << s.redundancy << "\n";
  out << "manifest -> " << manifest << "\n";
  return kExitOk;
}

// --- plucker

struct PluckerArgs {
  Common common;
  std::string scene_dir;
  int frame = -1;
  std::string out;
  std::optional<std::uint64_t> seed;
};

io::Tensor matrix_tensor(const Matrix<double>& m) {
  io::Tensor t;
  t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  t.data.resize(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) t.data[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  return t;
}

int cmd_plucker(const PluckerArgs& a, std::ostream& out) {
  const RunConfig cfg = a.common.load();
  const auto dir = io::read_scene_dir(require_path(a.scene_dir, cfg.scene_dir, "scene-dir"), png_depth_fallback());
  const fs::path dest = require_path(a.out, cfg.out, "out");
  const auto it = std::find_if(dir.frames.begin(), dir.frames.end(), [&](const Frame& f) { return f.id == a.frame; });
  if (it == dir.frames.end()) fail(ErrorCode::InvalidArgument, "frame " + std::to_string(a.frame) + " not in scene");

  const RayMap native = ray_map(it->pose, dir.intrinsics, dir.intrinsics.width, dir.intrinsics.height);
  const RayMap canonical = resize_ray_map(native, cfg.patch);
  const auto params = EmbedParams<double>::init(cfg.patch, a.seed.value_or(cfg.seed));
  const auto grid = patchify_embed(canonical, cfg.patch, params);

  std::error_code ec;
  if (fs::exists(dest, ec) && !fs::is_directory(dest, ec))
    fail(ErrorCode::IoError, dest.string() + " exists and is not a directory");
  fs::create_directories(dest, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dest.string() + ": " + ec.message());

  io::Tensor rays;
  rays.dims = {static_cast<std::uint32_t>(canonical.height), static_cast<std::uint32_t>(canonical.width),
               static_cast<std::uint32_t>(kRayChannels)};
  rays.data = canonical.data;
  io::write_tensor(dest / "raymap.cct", rays);
  io::write_tensor(dest / "tokens.cct", matrix_tensor(grid.tokens));
  io::write_tensor(dest / "embed_weight.cct", matrix_tensor(params.weight));
  io::write_tensor(dest / "embed_bias.cct", matrix_tensor(params.bias));
  out << "frame " << a.frame << ": ray map " << canonical.height << "x" << canonical.width << "x" << kRayChannels
      << ", tokens " << grid.size() << "x" << grid.dim() << " (grid " << grid.grid_height << "x" << grid.grid_width
      << ") -> " << dest.string() << "\n";
  return kExitOk;
}

// --- gradcheck

struct GradcheckArgs {
  Common common;
  std::uint64_t seed = 0;
  int trials = 20;
  std::string dims;
};

GradCheckDims parse_dims(const std::string& s) {
  GradCheckDims d;
  if (s.empty()) return d;
  const auto x = s.find('x');
  auto bad = [&] { fail(ErrorCode::ConfigError, "--dims must look like SxD, e.g. 8x16"); };
  if (x == std::string::npos) bad();
  const auto s_tok = io::detail::parse_double(std::string_view(s).substr(0, x));
  const auto d_tok = io::detail::parse_double(std::string_view(s).substr(x + 1));
  if (!s_tok || !d_tok || *s_tok < 1 || *d_tok < 1 || *s_tok != std::floor(*s_tok) || *d_tok != std::floor(*d_tok))
    bad();
  d.tokens = static_cast<int>(*s_tok);
  d.dim = static_cast<int>(*d_tok);
  // Largest head count in {4, 2, 1} that divides d.
  d.heads = d.dim % 4 == 0 ? 4 : (d.dim % 2 == 0 ? 2 : 1);
  return d;
}

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  if (a.trials < 1) fail(ErrorCode::ConfigError, "--trials must be >= 1");
  const GradCheckDims dims = parse_dims(a.dims);
  double worst = 0.0;
  for (int t = 0; t < a.trials; ++t) {
    const auto rep = grad_check(a.seed + static_cast<std::uint64_t>(t), dims);
    worst = std::max(worst, rep.max_rel_error);
    std::string where;
    double top = -1.0;
    for (const auto& e : rep.entries)
      if (e.max_rel_error > top) top = e.max_rel_error, where = e.name;
    out << "seed " << rep.seed << "  S=" << rep.tokens << " d=" << rep.dim << " h=" << rep.heads
        << " T=" << rep.text_tokens << " V=" << rep.views << "  max rel err " << std::scientific
        << std::setprecision(3) << rep.max_rel_error << std::defaultfloat << " (" << where << ")\n";
  }
  constexpr double kTolerance = 1e-4;
  const bool pass = worst < kTolerance;
  out << (pass ? "PASS" : "FAIL") << ": max relative error " << std::scientific << std::setprecision(3) << worst
      << std::defaultfloat << " over " << a.trials << " trials (tolerance 1e-4)\n";
  return pass ? kExitOk : kExitCheckFailed;
}

// --- train-demo

struct TrainArgs {
  Common common;
  std::optional<int> steps;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const RunConfig cfg = a.common.load();
  TrainConfig t = cfg.train;
  t.seed = a.seed.value_or(cfg.seed);
  t.loss = cfg.loss;
  if (a.steps) t.steps = *a.steps;
  if (a.lr) t.lr = *a.lr;
  const std::string dest = require_path(a.out, cfg.out, "out");
  const auto t0 = std::chrono::steady_clock::now();
  const TrainingReport r = train_adapter_demo(t);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_file(dest, to_jsonl(r));
  const auto& first = r.log.front();
  const auto& last = r.log.back();
  out << "train-demo: " << last.step << " steps in " << fmt(secs, 1) << " s\n";
  out << "  train pose_loss    " << fmt(first.train_pose_loss, 6) << " -> " << fmt(last.train_pose_loss, 6) << "\n";
  out << "  held-out rot (deg) " << fmt(first.heldout_median_rot_deg, 2) << " -> "
      << fmt(last.heldout_median_rot_deg, 2) << " (median)\n";
  out << "  held-out trans (m) " << fmt(first.heldout_median_trans, 3) << " -> " << fmt(last.heldout_median_trans, 3)
      << " (median)\n";
  out << "report -> " << dest << "\n";
  return kExitOk;
}

// --- eval-pose

struct EvalArgs {
  Common common;
  std::string pred;
  std::string gt;
  std::string out;
};

std::vector<Mat4> load_pose_list(const fs::path& path) {
  const std::string bytes = io::read_file(path);
  std::vector<Mat4> poses;
  if (bytes.size() >= 4 && bytes.compare(0, 4, "CCT1") == 0) {
    const io::Tensor t = io::decode_tensor(bytes, path.string());
    if (t.dims.size() != 3 || t.dims[1] != 4 || t.dims[2] != 4)
      fail(ErrorCode::ShapeMismatch, path.string() + ": pose tensor must have shape [n,4,4]");
    for (std::uint32_t i = 0; i < t.dims[0]; ++i) {
      Mat4 m;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = t.data[static_cast<std::size_t>(i) * 16 + r * 4 + c];
      poses.push_back(m);
    }
    return poses;
  }
  for (const auto& g : io::decode_manifest(bytes)) poses.push_back(g.target_pose);
  return poses;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const RunConfig cfg = a.common.load();
  const auto pred = load_pose_list(require_path(a.pred, cfg.pred, "pred"));
  const auto gt = load_pose_list(require_path(a.gt, cfg.gt, "gt"));
  const std::string dest = require_path(a.out, cfg.out, "out");
  if (pred.size() != gt.size())
    fail(ErrorCode::ShapeMismatch, "pred has " + std::to_string(pred.size()) + " poses, gt has " +
                                       std::to_string(gt.size()));
  std::vector<PoseErrorSample> errors;
  errors.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    CameraPose g;
    try {
      g = CameraPose::from_matrix(gt[i], 1e-6);
    } catch (const Error& e) {
      fail(e.code(), "gt pose " + std::to_string(i) + ": " + e.what());
    }
    errors.push_back(pose_errors(RawPose(pred[i]), g));
  }
  const PoseAccuracyReport rep = accuracy_report(errors);
  io::write_file(dest, to_json(rep).dump(2) + "\n");
  out << "eval-pose: n=" << rep.n << "\n";
  for (const auto& [t, pct] : rep.rot) out << "  R@" << threshold_key(t) << "deg  " << fmt(pct, 2) << "%\n";
  for (const auto& [t, pct] : rep.trans) out << "  t@" << threshold_key(t) << rep.unit << "  " << fmt(pct, 2) << "%\n";
  out << "report -> " << dest << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "RunConfig JSON file")->check(CLI::ExistingFile);
  sub->add_option("--threads", c.threads, "worker threads (default: CAMCUE_THREADS or all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"camcue: multi-view camera geometry, view-group curation and pose-head tools", "camcue"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "show help for all commands");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "render a synthetic box-room scene directory");
  add_common(s, synth.common);
  s->add_option("--seed", synth.seed, "scene and trajectory seed");
  s->add_option("--frames", synth.frames, "number of trajectory frames")->capture_default_str();
  s->add_option("--obstacles", synth.obstacles, "number of obstacle boxes")->capture_default_str();
  s->add_option("--out", synth.out, "output scene directory");
  s->add_option("--pattern", synth.pattern, "trajectory pattern")
      ->check(CLI::IsMember({"orbit", "random-walk"}))
      ->capture_default_str();
  s->add_option("--width", synth.width, "image width")->capture_default_str();
  s->add_option("--height", synth.height, "image height")->capture_default_str();

  SelectArgs select;
  auto* sel = app.add_subcommand("select", "curate target/context view groups into a manifest");
  add_common(sel, select.common);
  sel->add_option("--scene-dir", select.scene_dir, "input scene directory");
  sel->add_option("--out", select.out, "output manifest (jsonl)");

  PluckerArgs plucker;
  auto* pl = app.add_subcommand("plucker", "dump the canonical ray map and camera tokens of one frame");
  add_common(pl, plucker.common);
  pl->add_option("--scene-dir", plucker.scene_dir, "input scene directory");
  pl->add_option("--frame", plucker.frame, "frame id")->required();
  pl->add_option("--out", plucker.out, "output directory");
  pl->add_option("--seed", plucker.seed, "embedding init seed (default: config seed)");

  GradcheckArgs gc;
  auto* g = app.add_subcommand("gradcheck", "compare analytic gradients with central differences");
  add_common(g, gc.common);
  g->add_option("--seed", gc.seed, "first seed")->capture_default_str();
  g->add_option("--trials", gc.trials, "number of seeds")->capture_default_str();
  g->add_option("--dims", gc.dims, "fixed SxD (visual tokens x model width); random when omitted");

  TrainArgs train;
  auto* tr = app.add_subcommand("train-demo", "train the pose head on a synthetic task");
  add_common(tr, train.common);
  tr->add_option("--steps", train.steps, "optimizer steps (overrides config)");
  tr->add_option("--lr", train.lr, "learning rate (overrides config)");
  tr->add_option("--seed", train.seed, "seed (overrides config)");
  tr->add_option("--out", train.out, "output report (jsonl)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval-pose", "pose accuracy of predictions against ground truth");
  add_common(e, ev.common);
  e->add_option("--pred", ev.pred, "predicted poses: manifest or CCT1 [n,4,4] tensor");
  e->add_option("--gt", ev.gt, "ground-truth poses: manifest or CCT1 [n,4,4] tensor");
  e->add_option("--out", ev.out, "output report (json)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (sel->parsed()) return cmd_select(select, out);
    if (pl->parsed()) return cmd_plucker(plucker, out);
    if (g->parsed()) return cmd_gradcheck(gc, out);
    if (tr->parsed()) return cmd_train(train, out);
    if (e->parsed()) return cmd_eval(ev, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace camcue::cli
