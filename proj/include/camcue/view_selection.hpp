#pragma once

// Target/context group curation. Candidates pass a pose filter, a greedy
// depth-visibility cover picks the contexts, then coverage and redundancy
// gates decide acceptance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "camcue/camera.hpp"
#include "camcue/error.hpp"
#include "camcue/frame.hpp"
#include "camcue/parallel.hpp"

namespace camcue {

enum class DistinctnessMode {
  TargetRelative,     // candidate must differ enough from the target
  CandidatePairwise,  // candidate must differ enough from every kept candidate
};

struct SelectionConfig {
  double d_min = 0.4;
  double d_max = 2.5;
  double distinct_d = 0.6;
  double distinct_theta_deg = 15.0;
  int k = 4;
  double gamma = 0.80;
  double tau_t = 0.5;
  double tau_theta_deg = 45.0;
  double epsilon = 0.05;
  int sample_stride = 8;
  DistinctnessMode distinctness = DistinctnessMode::TargetRelative;

  void validate() const {
    if (!(d_min > 0.0 && d_min < d_max)) fail(ErrorCode::ConfigError, "need 0 < d_min < d_max");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail(ErrorCode::ConfigError, "need 0 < gamma <= 1");
    if (k < 1) fail(ErrorCode::ConfigError, "need k >= 1");
    if (!(epsilon > 0.0)) fail(ErrorCode::ConfigError, "need epsilon > 0");
    if (sample_stride < 1) fail(ErrorCode::ConfigError, "need sample_stride >= 1");
    if (!(distinct_d >= 0.0 && distinct_theta_deg >= 0.0 && tau_t >= 0.0 && tau_theta_deg >= 0.0))
      fail(ErrorCode::ConfigError, "thresholds must be >= 0");
  }
};

namespace detail {

inline bool distinct(const CameraPose& a, const CameraPose& b, const SelectionConfig& cfg) {
  const double dist = (a.center() - b.center()).norm();
  return dist > cfg.distinct_d || rotation_geodesic_deg(a.rotation(), b.rotation()) > cfg.distinct_theta_deg;
}

inline bool in_range(const CameraPose& a, const CameraPose& b, const SelectionConfig& cfg) {
  const double dist = (a.center() - b.center()).norm();
  return dist > cfg.d_min && dist < cfg.d_max;
}

}  // namespace detail

/// Target-relative candidate test: translation in (d_min, d_max) and either
/// translation > distinct_d or rotation > distinct_theta.
inline bool pose_filter(const CameraPose& target, const CameraPose& candidate, const SelectionConfig& cfg) {
  return detail::in_range(target, candidate, cfg) && detail::distinct(target, candidate, cfg);
}

inline bool pose_filter(const Frame& target, const Frame& candidate, const SelectionConfig& cfg) {
  return pose_filter(target.pose, candidate.pose, cfg);
}

/// Indices into `frames` (ascending frame id) of admissible context views.
inline std::vector<std::size_t> filter_candidates(const Frame& target, const std::vector<Frame>& frames,
                                                  const std::vector<std::size_t>& id_order,
                                                  const SelectionConfig& cfg) {
  std::vector<std::size_t> kept;
  for (std::size_t idx : id_order) {
    const Frame& c = frames[idx];
    if (c.id == target.id) continue;
    if (cfg.distinctness == DistinctnessMode::TargetRelative) {
      if (pose_filter(target, c, cfg)) kept.push_back(idx);
      continue;
    }
    if (!detail::in_range(target.pose, c.pose, cfg)) continue;
    const bool distinct_from_kept = std::all_of(kept.begin(), kept.end(), [&](std::size_t j) {
      return detail::distinct(frames[j].pose, c.pose, cfg);
    });
    if (distinct_from_kept) kept.push_back(idx);
  }
  return kept;
}

/// Valid-depth pixels on a regular stride grid, row-major.
inline SampleSet target_samples(const Frame& target, int stride) {
  if (stride < 1) fail(ErrorCode::InvalidArgument, "stride must be >= 1");
  SampleSet s;
  for (int v = 0; v < target.depth.height; v += stride)
    for (int u = 0; u < target.depth.width; u += stride)
      if (target.depth.valid(u, v)) s.pixels.push_back({u, v});
  if (s.empty()) fail(ErrorCode::EmptySamples, "target frame " + std::to_string(target.id) + " has no valid depth");
  return s;
}

/// Sorted indices into a SampleSet.
using VisibleSet = std::vector<std::uint32_t>;

/// Depth-test visibility of target samples in a context view: the sample's
/// world point must land in bounds in front of the context camera, on a pixel
/// with valid depth, no farther than that depth plus epsilon.
inline VisibleSet visibility(const SampleSet& samples, const Frame& target, const Frame& context, double epsilon) {
  VisibleSet out;
  const DepthMap& dc = context.depth;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const PixelSample& p = samples.pixels[i];
    const double d = target.depth.at(p.u, p.v);
    if (!(d > 0.0)) continue;
    const Vec3 x = back_project(p.u, p.v, d, target.pose, target.intrinsics);
    const Projection proj = project(x, context.pose, context.intrinsics);
    if (!proj.ok()) continue;
    const int cu = proj.pixel_u(), cv = proj.pixel_v();
    if (!dc.in_bounds(cu, cv) || !dc.valid(cu, cv)) continue;
    if (proj.z <= dc.at(cu, cv) + epsilon) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

struct GreedyResult {
  std::vector<int> chosen_ids;
  std::vector<std::size_t> gains;  // marginal new coverage of each pick
  std::vector<char> covered;       // membership mask over the universe
  std::size_t covered_count = 0;
};

/// Greedy max coverage over precomputed sets. Ties go to the earliest entry;
/// pass `ids` ascending for smallest-id tie-breaks.
inline GreedyResult greedy_max_coverage(const std::vector<int>& ids, const std::vector<VisibleSet>& sets,
                                        std::size_t universe, int k) {
  if (ids.size() != sets.size()) fail(ErrorCode::InvalidArgument, "ids and sets differ in length");
  if (k < 0 || ids.size() < static_cast<std::size_t>(k))
    fail(ErrorCode::InsufficientCandidates, "need at least k candidates");
  GreedyResult r;
  r.covered.assign(universe, 0);
  std::vector<char> used(ids.size(), 0);
  for (int round = 0; round < k; ++round) {
    std::size_t best = ids.size();
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < ids.size(); ++c) {
      if (used[c]) continue;
      std::size_t gain = 0;
      for (std::uint32_t e : sets[c]) gain += r.covered[e] ? 0 : 1;
      if (best == ids.size() || gain > best_gain) {
        best = c;
        best_gain = gain;
      }
    }
    used[best] = 1;
    for (std::uint32_t e : sets[best]) r.covered[e] = 1;
    r.chosen_ids.push_back(ids[best]);
    r.gains.push_back(best_gain);
    r.covered_count += best_gain;
  }
  return r;
}

/// Picks cfg.k contexts for `target` maximizing covered samples. Candidates
/// are visited in ascending id order.
inline GreedyResult greedy_select(const Frame& target, const std::vector<const Frame*>& candidates,
                                  const SampleSet& samples, const SelectionConfig& cfg, int threads = 1) {
  if (candidates.size() < static_cast<std::size_t>(cfg.k))
    fail(ErrorCode::InsufficientCandidates, "fewer candidates than contexts to select");
  std::vector<const Frame*> ordered = candidates;
  std::stable_sort(ordered.begin(), ordered.end(), [](const Frame* a, const Frame* b) { return a->id < b->id; });
  std::vector<int> ids(ordered.size());
  std::vector<VisibleSet> sets(ordered.size());
  parallel_for(ordered.size(), threads, [&](std::size_t i) {
    ids[i] = ordered[i]->id;
    sets[i] = visibility(samples, target, *ordered[i], cfg.epsilon);
  });
  return greedy_max_coverage(ids, sets, samples.size(), cfg.k);
}

struct ViewGroup {
  std::string scene;
  int target_id = 0;
  std::vector<int> context_ids;
  double coverage = 0.0;
  std::vector<std::size_t> gains;
  std::size_t covered = 0;
  std::size_t samples = 0;
  Mat4 target_pose = Mat4::Identity();

  bool operator==(const ViewGroup&) const = default;
};

/// True when an accepted group's target is within both tau_t and tau_theta.
inline bool redundant(const CameraPose& target, const std::vector<ViewGroup>& accepted, const SelectionConfig& cfg) {
  return std::any_of(accepted.begin(), accepted.end(), [&](const ViewGroup& g) {
    const auto other = decompose(g.target_pose);
    const double dt = (target.center() - other.translation).norm();
    if (!(dt < cfg.tau_t)) return false;
    return rotation_geodesic_deg(target.rotation(), other.rotation) < cfg.tau_theta_deg;
  });
}

struct SelectionStats {
  std::size_t targets = 0;
  std::size_t accepted = 0;
  std::size_t pose_filter = 0;         // no candidate survived the pose filter
  std::size_t too_few_candidates = 0;  // some, but fewer than k
  std::size_t no_samples = 0;          // target has no valid depth samples
  std::size_t coverage = 0;
  std::size_t redundancy = 0;
};

struct SelectionResult {
  std::vector<ViewGroup> groups;
  SelectionStats stats;
};

/// Full curation pass over one scene's frames. Targets are evaluated
/// independently, then committed in ascending id order through the
/// redundancy gate, so the result does not depend on `threads`.
inline SelectionResult build_groups(const std::vector<Frame>& frames, const SelectionConfig& cfg,
                                    const std::string& scene_name = "", int threads = 1) {
  cfg.validate();
  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frames[a].id < frames[b].id; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (frames[order[i]].id == frames[order[i - 1]].id)
      fail(ErrorCode::InvalidArgument, "duplicate frame id " + std::to_string(frames[order[i]].id));

  enum class Outcome { Accepted, PoseFilter, TooFew, NoSamples, Coverage };
  struct Pending {
    Outcome outcome = Outcome::PoseFilter;
    ViewGroup group;
  };
  std::vector<Pending> pending(order.size());

  parallel_for(order.size(), threads, [&](std::size_t slot) {
    const Frame& t = frames[order[slot]];
    Pending& out = pending[slot];
    const auto cand_idx = filter_candidates(t, frames, order, cfg);
    if (cand_idx.empty()) {
      out.outcome = Outcome::PoseFilter;
      return;
    }
    if (cand_idx.size() < static_cast<std::size_t>(cfg.k)) {
      out.outcome = Outcome::TooFew;
      return;
    }
    SampleSet samples;
    try {
      samples = target_samples(t, cfg.sample_stride);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptySamples) throw;
      out.outcome = Outcome::NoSamples;
      return;
    }
    std::vector<const Frame*> cands;
    for (std::size_t i : cand_idx) cands.push_back(&frames[i]);
    const GreedyResult g = greedy_select(t, cands, samples, cfg);
    ViewGroup& vg = out.group;
    vg.scene = scene_name;
    vg.target_id = t.id;
    vg.context_ids = g.chosen_ids;
    vg.gains = g.gains;
    vg.covered = g.covered_count;
    vg.samples = samples.size();
    vg.coverage = static_cast<double>(g.covered_count) / static_cast<double>(samples.size());
    vg.target_pose = t.pose.matrix();
    out.outcome = vg.coverage >= cfg.gamma ? Outcome::Accepted : Outcome::Coverage;
  });

  SelectionResult result;
  result.stats.targets = order.size();
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    Pending& p = pending[slot];
    switch (p.outcome) {
      case Outcome::PoseFilter: ++result.stats.pose_filter; continue;
      case Outcome::TooFew: ++result.stats.too_few_candidates; continue;
      case Outcome::NoSamples: ++result.stats.no_samples; continue;
      case Outcome::Coverage: ++result.stats.coverage; continue;
      case Outcome::Accepted: break;
    }
    if (redundant(frames[order[slot]].pose, result.groups, cfg)) {
      ++result.stats.redundancy;
      continue;
    }
    result.groups.push_back(std::move(p.group));
    ++result.stats.accepted;
  }
  return result;
}

}  // namespace camcue
