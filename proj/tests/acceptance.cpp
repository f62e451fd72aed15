// Acceptance checks: one PASS/FAIL line per criterion, each with a time budget.
// Exit status is 1 when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "../tools/commands.hpp"
#include "support.hpp"

namespace camcue {
namespace {

namespace fs = std::filesystem;
namespace t = camcue::testing;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

std::string fixed(double v, int prec = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome geometry_round_trip() {
  std::mt19937_64 rng(1001);
  double px = 0.0, m = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto k = t::random_intrinsics(rng);
    const auto pose = t::random_pose(rng);
    const double u = t::uniform(rng, 0.0, k.width), v = t::uniform(rng, 0.0, k.height);
    const double depth = t::uniform(rng, 0.1, 20.0);
    const Vec3 x = back_project(u, v, depth, pose, k);
    const Projection p = project(x, pose, k);
    if (!p.ok()) return {false, "sample " + std::to_string(i) + " projected behind the camera"};
    px = std::max({px, std::abs(p.u - u), std::abs(p.v - v)});
    m = std::max({m, std::abs(p.z - depth), (back_project(p.u, p.v, p.z, pose, k) - x).norm()});
  }
  return {px < 1e-9 && m < 1e-9, "max " + sci(px) + " px, " + sci(m) + " m over 10000 tuples"};
}

// ---------------------------------------------------------------- 2

Outcome plucker_invariants() {
  std::mt19937_64 rng(1002);
  const PatchConfig cfg;
  double norm_err = 0.0, dot_err = 0.0;
  std::size_t pixels = 0;
  auto scan = [&](const RayMap& r) {
    for (int v = 0; v < r.height; ++v)
      for (int u = 0; u < r.width; ++u) {
        const Vec3 d = r.direction(u, v), mo = r.moment(u, v);
        norm_err = std::max(norm_err, std::abs(d.norm() - 1.0));
        dot_err = std::max(dot_err, std::abs(d.dot(mo)));
        ++pixels;
      }
  };
  for (int i = 0; i < 100; ++i) {
    const auto k = t::random_intrinsics(rng);
    const RayMap native = ray_map(t::random_pose(rng), k, k.width, k.height);
    scan(native);
    scan(resize_ray_map(native, cfg));
  }
  return {norm_err < 1e-9 && dot_err < 1e-9,
          "| |d|-1 | " + sci(norm_err) + ", |d.m| " + sci(dot_err) + " over " + std::to_string(pixels) + " pixels"};
}

// ---------------------------------------------------------------- 3

// A pixel is "near a depth discontinuity" when some 5x5 window centered
// within 2 px of it spans more than 2*eps of depth, in either the target map
// (around the sample) or the context map (around the projected pixel).
bool near_jump(const DepthMap& d, int cu, int cv, double jump) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  bool any = false;
  for (int v = cv - 2; v <= cv + 2; ++v)
    for (int u = cu - 2; u <= cu + 2; ++u) {
      if (!d.in_bounds(u, v)) continue;
      const double z = d.at(u, v);
      if (!(z > 0.0)) return true;
      lo = std::min(lo, z);
      hi = std::max(hi, z);
      any = true;
    }
  return any && hi - lo > jump;
}

bool near_image_border(const DepthMap& d, int u, int v) {
  return u < 2 || v < 2 || u >= d.width - 2 || v >= d.height - 2;
}

Outcome visibility_equivalence() {
  constexpr double kEps = 0.05;
  std::size_t agree = 0, total = 0, disagree = 0, explained = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scene scene = make_scene(seed, 3 + static_cast<int>(seed % 6));
    const auto traj = sample_trajectory(scene, 8, seed + 100, TrajectoryPattern::RandomWalk);
    const auto frames = render_frames(scene, traj, default_synth_intrinsics(64, 48));
    for (const Frame& tf : frames) {
      const auto samples = target_samples(tf, 4);
      for (const Frame& cf : frames) {
        if (cf.id == tf.id) continue;
        const auto a = visibility(samples, tf, cf, kEps);
        const auto b = oracle_visibility(scene, samples, tf, cf);
        std::vector<char> in_a(samples.size(), 0), in_b(samples.size(), 0);
        for (auto i : a) in_a[i] = 1;
        for (auto i : b) in_b[i] = 1;
        for (std::size_t i = 0; i < samples.size(); ++i) {
          ++total;
          if (in_a[i] == in_b[i]) {
            ++agree;
            continue;
          }
          ++disagree;
          const auto& p = samples.pixels[i];
          bool ok = near_jump(tf.depth, p.u, p.v, 2 * kEps);
          const Vec3 x = back_project(p.u, p.v, tf.depth.at(p.u, p.v), tf.pose, tf.intrinsics);
          const Projection pr = project(x, cf.pose, cf.intrinsics);
          if (!ok && pr.ok()) {
            const int cu = pr.pixel_u(), cv = pr.pixel_v();
            ok = near_jump(cf.depth, cu, cv, 2 * kEps) || near_image_border(cf.depth, cu, cv);
          }
          explained += ok ? 1 : 0;
        }
      }
    }
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(total);
  return {rate >= 0.99 && explained == disagree,
          "agreement " + fixed(100.0 * rate, 3) + "% of " + std::to_string(total) + " samples; " +
              std::to_string(explained) + "/" + std::to_string(disagree) + " disagreements near a depth discontinuity"};
}

// ---------------------------------------------------------------- 4

Outcome greedy_optimality() {
  std::mt19937_64 rng(1004);
  std::size_t rounds = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const std::uint32_t universe = std::uniform_int_distribution<std::uint32_t>(1, 60)(rng);
    const double density = t::uniform(rng, 0.05, 0.6);
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::vector<VisibleSet> sets(ids.size());
    std::vector<std::set<std::uint32_t>> ref(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ids[i] = static_cast<int>(2 * i + 3);
      for (std::uint32_t e = 0; e < universe; ++e)
        if (t::uniform(rng, 0, 1) < density) ref[i].insert(e);
      sets[i].assign(ref[i].begin(), ref[i].end());
    }
    const auto g = greedy_max_coverage(ids, sets, universe, k);
    std::set<std::uint32_t> covered;
    std::set<int> used;
    for (int r = 0; r < k; ++r, ++rounds) {
      const auto best = t::exhaustive_round(ids, ref, covered, used);
      const int pick = g.chosen_ids[static_cast<std::size_t>(r)];
      const auto idx = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), pick) - ids.begin());
      std::size_t gain = 0;
      for (auto e : ref[idx]) gain += covered.count(e) ? 0 : 1;
      if (gain != best.best_gain || g.gains[static_cast<std::size_t>(r)] != best.best_gain)
        return {false, "instance " + std::to_string(inst) + " round " + std::to_string(r) + ": gain " +
                           std::to_string(gain) + " vs exhaustive " + std::to_string(best.best_gain)};
      covered.insert(ref[idx].begin(), ref[idx].end());
      used.insert(pick);
    }
  }
  return {true, "200 instances, " + std::to_string(rounds) + " rounds, every pick a per-round maximum"};
}

// ---------------------------------------------------------------- 5

Outcome pipeline_gates() {
  t::TempDir tmp;
  std::ostringstream sink;
  const std::string scene = (tmp / "orbit").string();
  if (cli::run({"synth", "--seed", "3", "--frames", "40", "--pattern", "orbit", "--out", scene}, sink, sink) != 0)
    return {false, "synth failed: " + sink.str()};
  const std::string m1 = (tmp / "a.jsonl").string(), m2 = (tmp / "b.jsonl").string();
  if (cli::run({"select", "--scene-dir", scene, "--out", m1}, sink, sink) != 0 ||
      cli::run({"select", "--scene-dir", scene, "--out", m2, "--threads", "1"}, sink, sink) != 0)
    return {false, "select failed: " + sink.str()};
  const auto groups = io::read_manifest(m1);
  const SelectionConfig cfg;
  if (groups.empty()) return {false, "no groups accepted"};
  for (const auto& g : groups)
    if (!(g.coverage >= cfg.gamma)) return {false, "group " + std::to_string(g.target_id) + " coverage " + fixed(g.coverage, 3)};
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const auto a = decompose(groups[i].target_pose), b = decompose(groups[j].target_pose);
      if ((a.translation - b.translation).norm() < cfg.tau_t &&
          rotation_geodesic_deg(a.rotation, b.rotation) < cfg.tau_theta_deg)
        return {false, "targets " + std::to_string(groups[i].target_id) + " and " +
                           std::to_string(groups[j].target_id) + " are redundant"};
    }
  const bool same = io::read_file(m1) == io::read_file(m2);
  double min_cov = 1.0;
  for (const auto& g : groups) min_cov = std::min(min_cov, g.coverage);
  return {same, std::to_string(groups.size()) + " groups, min coverage " + fixed(min_cov, 3) +
                    (same ? ", runs byte-identical" : ", runs DIFFER")};
}

// ---------------------------------------------------------------- 6

Outcome gradient_fidelity() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rep = grad_check(seed);
    if (rep.tokens > 8 || rep.dim > 16) return {false, "dims out of range for seed " + std::to_string(seed)};
    worst = std::max(worst, rep.max_rel_error);
  }
  return {worst < 1e-4, "max relative error " + sci(worst) + " over 20 seeds"};
}

// ---------------------------------------------------------------- 7

Outcome trainer_convergence() {
  TrainConfig cfg;  // seed 0, 2000 steps
  const auto r = train_adapter_demo(cfg);
  const auto& first = r.log.front();
  const auto& last = r.log.back();
  const bool loss_ok = last.train_pose_loss < 0.1 * first.train_pose_loss;
  const bool rot_ok = last.heldout_median_rot_deg < first.heldout_median_rot_deg;
  return {loss_ok && rot_ok && last.step == 2000,
          "train pose_loss " + fixed(first.train_pose_loss, 4) + " -> " + fixed(last.train_pose_loss, 5) +
              ", held-out median rot " + fixed(first.heldout_median_rot_deg) + " -> " +
              fixed(last.heldout_median_rot_deg) + " deg"};
}

// ---------------------------------------------------------------- 8

Outcome metric_exactness() {
  std::vector<PoseErrorSample> hand;
  for (double d : {4.0, 9.0, 19.0, 30.0}) hand.push_back({d, 0.0, 0.0});
  const auto r = accuracy_report(hand);
  if (r.rot_at(5) != 25.0 || r.rot_at(10) != 50.0 || r.rot_at(20) != 75.0)
    return {false, "hand set gave " + fixed(r.rot_at(5)) + "/" + fixed(r.rot_at(10)) + "/" + fixed(r.rot_at(20))};
  std::mt19937_64 rng(1008);
  AccuracyThresholds th;
  th.rot_deg = {0.5, 1, 2, 5, 10, 15, 20, 45, 90};
  th.trans = {0.01, 0.05, 0.1, 0.3, 0.5, 1.0};
  for (int i = 0; i < 1000; ++i) {
    std::vector<PoseErrorSample> s(static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 50)(rng)));
    for (auto& e : s) e = {t::uniform(rng, 0, 100), t::uniform(rng, 0, 1.2), 0.0};
    const auto rep = accuracy_report(s, th);
    for (std::size_t j = 1; j < rep.rot.size(); ++j)
      if (rep.rot[j].second < rep.rot[j - 1].second) return {false, "rotation percentages not monotone"};
    for (std::size_t j = 1; j < rep.trans.size(); ++j)
      if (rep.trans[j].second < rep.trans[j - 1].second) return {false, "translation percentages not monotone"};
  }
  return {true, "R@5/10/20 = 25/50/75; 1000 random reports monotone"};
}

// ---------------------------------------------------------------- 9

Outcome io_robustness() {
  t::TempDir tmp;
  std::mt19937_64 rng(1009);

  // Round trips.
  const Scene scene = make_scene(9, 5);
  const auto k = default_synth_intrinsics(32, 24);
  auto frames = render_frames(scene, sample_trajectory(scene, 6, 9, TrajectoryPattern::RandomWalk), k);
  for (auto& f : frames)
    for (auto& v : f.depth.values) v = static_cast<float>(v);  // stored at f32
  io::write_scene_dir(tmp / "scene", k, frames, &scene);
  const auto back = io::read_scene_dir(tmp / "scene");
  if (!back.scene || !(*back.scene == scene) || back.frames.size() != frames.size())
    return {false, "scene directory round trip"};
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (back.frames[i].pose.matrix() != frames[i].pose.matrix() || back.frames[i].depth.values != frames[i].depth.values)
      return {false, "frame " + std::to_string(i) + " round trip"};
  const auto bk = back.intrinsics;
  if (bk.fx != k.fx || bk.fy != k.fy || bk.cx != k.cx || bk.cy != k.cy || bk.width != k.width || bk.height != k.height)
    return {false, "intrinsics round trip"};

  io::Tensor tensor{{3, 5, 2}, {}};
  for (int i = 0; i < 30; ++i) tensor.data.push_back(t::uniform(rng, -1e3, 1e3));
  io::write_tensor(tmp / "t.cct", tensor);
  if (!(io::read_tensor(tmp / "t.cct") == tensor)) return {false, "tensor round trip"};

  std::vector<ViewGroup> groups;
  for (int i = 0; i < 5; ++i) {
    ViewGroup g;
    g.scene = "s";
    g.target_id = i * 10;
    g.context_ids = {i * 10 + 1, i * 10 + 2, i * 10 + 3, i * 10 + 4};
    g.coverage = t::uniform(rng, 0.8, 1.0);
    g.target_pose = t::random_pose(rng).matrix();
    groups.push_back(g);
  }
  io::write_manifest(tmp / "m.jsonl", groups);
  const auto mback = io::read_manifest(tmp / "m.jsonl");
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (mback[i].target_id != groups[i].target_id || mback[i].context_ids != groups[i].context_ids ||
        mback[i].coverage != groups[i].coverage || mback[i].target_pose != groups[i].target_pose)
      return {false, "manifest round trip"};

  // Fuzz corpus: truncations and byte corruptions of every file kind.
  struct Kind {
    std::string name, bytes;
    std::function<void(const fs::path&)> read;
  };
  const std::vector<Kind> kinds{
      {"cct", io::read_file(tmp / "t.cct"), [](const fs::path& p) { io::read_tensor(p); }},
      {"ccd", io::read_file(tmp / "scene" / "depth" / "0.ccd"), [](const fs::path& p) { io::read_depth(p); }},
      {"pose", io::read_file(tmp / "scene" / "pose" / "0.txt"), [](const fs::path& p) { io::read_pose_file(p); }},
      {"intr", io::read_file(tmp / "scene" / "intrinsics.txt"), [](const fs::path& p) { io::read_intrinsics(p); }},
      {"jsonl", io::read_file(tmp / "m.jsonl"), [](const fs::path& p) { io::read_manifest(p); }},
  };
  std::size_t files = 0, typed = 0, accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    const Kind& kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
    std::string b = kind.bytes;
    if (i % 2 == 0) {
      b.resize(rng() % b.size());
    } else {
      const int edits = 1 + static_cast<int>(rng() % 8);
      for (int e = 0; e < edits; ++e) b[rng() % b.size()] = static_cast<char>(rng());
    }
    const fs::path p = tmp / ("fuzz_" + std::to_string(i) + "." + kind.name);
    io::write_file(p, b);
    ++files;
    try {
      kind.read(p);
      ++accepted;
    } catch (const Error&) {
      ++typed;
    } catch (const std::exception& ex) {
      return {false, "untyped exception on " + p.filename().string() + ": " + ex.what()};
    }
  }
  return {true, "round trips lossless; fuzz " + std::to_string(files) + " files: " + std::to_string(typed) +
                    " typed errors, " + std::to_string(accepted) + " still valid"};
}

}  // namespace
}  // namespace camcue

int main() {
  using namespace camcue;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "geometry round trip", 1.0, geometry_round_trip},
      {2, "ray map invariants", 5.0, plucker_invariants},
      {3, "visibility oracle equivalence", 60.0, visibility_equivalence},
      {4, "greedy per-step optimality", 5.0, greedy_optimality},
      {5, "pipeline gate invariants", 60.0, pipeline_gates},
      {6, "gradient fidelity", 30.0, gradient_fidelity},
      {7, "trainer convergence", 120.0, trainer_convergence},
      {8, "metric exactness", 1.0, metric_exactness},
      {9, "I/O robustness", 30.0, io_robustness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("threw: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.ok && in_time;
    failed += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
              << fixed(secs, 2) << " s, limit " << fixed(c.budget_s, 0) << " s" << (in_time ? "" : ", OVER BUDGET")
              << ")" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
