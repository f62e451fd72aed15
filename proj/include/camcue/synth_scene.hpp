#pragma once

// Procedural box-room scenes with analytic depth and visibility. World frame
// is z-up; the floor is the room's min-z face.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "camcue/camera.hpp"
#include "camcue/error.hpp"
#include "camcue/frame.hpp"
#include "camcue/parallel.hpp"

namespace camcue {

struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Ones();

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }

  bool contains(const Vec3& p, double margin = 0.0) const {
    return (p.array() > min.array() + margin).all() && (p.array() < max.array() - margin).all();
  }

  bool overlaps(const Box& o, double gap = 0.0) const {
    return (min.array() < o.max.array() + gap).all() && (o.min.array() < max.array() + gap).all();
  }

  // Distance from p to the nearest point of the box boundary.
  double surface_distance(const Vec3& p) const {
    const Vec3 below = min - p;
    const Vec3 above = p - max;
    const Vec3 outside = below.cwiseMax(above).cwiseMax(0.0);
    if (outside.squaredNorm() > 0.0) return outside.norm();
    return std::min((p - min).minCoeff(), (max - p).minCoeff());
  }

  bool operator==(const Box&) const = default;
};

struct RayInterval {
  double enter = 0.0;
  double exit = 0.0;
};

/// Slab-method ray/box intersection. `dir` need not be unit length; the
/// returned parameters are in units of `dir`.
inline std::optional<RayInterval> intersect_ray_box(const Vec3& origin, const Vec3& dir, const Box& box) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(dir[axis]) < 1e-300) {
      if (origin[axis] < box.min[axis] || origin[axis] > box.max[axis]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / dir[axis];
    double a = (box.min[axis] - origin[axis]) * inv;
    double b = (box.max[axis] - origin[axis]) * inv;
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  return RayInterval{t0, t1};
}

struct Obstacle {
  int id = 0;
  Box box;
  bool operator==(const Obstacle&) const = default;
};

struct Scene {
  Box room;
  std::vector<Obstacle> obstacles;
  std::uint64_t seed = 0;

  bool operator==(const Scene&) const = default;

  // Camera centers must be inside the room and outside every obstacle.
  bool is_free(const Vec3& p, double margin = 0.0) const {
    if (!room.contains(p, margin)) return false;
    for (const auto& o : obstacles) {
      if (o.box.contains(p) || o.box.surface_distance(p) <= margin) return false;
    }
    return true;
  }

  // Distance from p to the closest scene surface (walls or obstacle faces).
  double surface_distance(const Vec3& p) const {
    double best = room.surface_distance(p);
    for (const auto& o : obstacles) best = std::min(best, o.box.surface_distance(p));
    return best;
  }
};

inline constexpr double kObstacleGap = 0.1;
inline constexpr double kObstacleMaxHeight = 1.4;

/// Deterministic room with n pairwise-disjoint floor-standing boxes.
inline Scene make_scene(std::uint64_t seed, int n_obstacles) {
  if (n_obstacles < 0) fail(ErrorCode::InvalidArgument, "obstacle count must be >= 0");
  std::mt19937_64 rng(seed);
  auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  Scene scene;
  scene.seed = seed;
  scene.room = Box{Vec3::Zero(), Vec3(uni(4.0, 6.0), uni(4.0, 6.0), uni(2.6, 3.0))};

  constexpr int kMaxAttempts = 10000;
  int attempts = 0;
  while (static_cast<int>(scene.obstacles.size()) < n_obstacles) {
    if (++attempts > kMaxAttempts) fail(ErrorCode::InvalidArgument, "could not place the requested obstacles");
    const double sx = uni(0.4, 1.2);
    const double sy = uni(0.4, 1.2);
    const double sz = uni(0.4, kObstacleMaxHeight);
    const Vec3& rmax = scene.room.max;
    const double x = uni(kObstacleGap, rmax.x() - kObstacleGap - sx);
    const double y = uni(kObstacleGap, rmax.y() - kObstacleGap - sy);
    const Box candidate{Vec3(x, y, 0.01), Vec3(x + sx, y + sy, 0.01 + sz)};
    const bool clash = std::any_of(scene.obstacles.begin(), scene.obstacles.end(),
                                   [&](const Obstacle& o) { return o.box.overlaps(candidate, kObstacleGap); });
    if (!clash) scene.obstacles.push_back({static_cast<int>(scene.obstacles.size()), candidate});
  }
  return scene;
}

/// Distance along `dir` (in units of dir) to the nearest surface, or nullopt.
inline std::optional<double> cast_ray(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  const auto room_hit = intersect_ray_box(origin, dir, scene.room);
  if (!room_hit || room_hit->exit <= 0.0) return std::nullopt;
  double best = room_hit->exit;
  for (const auto& o : scene.obstacles) {
    const auto hit = intersect_ray_box(origin, dir, o.box);
    if (hit && hit->enter > 0.0 && hit->enter < best) best = hit->enter;
  }
  return best;
}

/// Exact depth (camera-frame z) of the nearest surface per pixel. `k` is
/// rescaled to width x height when the sizes differ.
inline DepthMap render_depth(const Scene& scene, const CameraPose& pose, const CameraIntrinsics& k, int width,
                             int height, int threads = 1) {
  k.validate();
  if (!scene.room.contains(pose.center())) fail(ErrorCode::CameraOutsideRoom, "camera center is outside the room");
  const CameraIntrinsics ks = (width == k.width && height == k.height) ? k : k.scaled_to(width, height);
  const Mat3 r = pose.rotation();
  const Vec3 o = pose.center();
  DepthMap depth(width, height);
  parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < width; ++u) {
      // Camera-frame ray with z = 1, so the hit parameter is the depth.
      const Vec3 dir = r * pixel_ray_camera(u, v, ks);
      const auto t = cast_ray(scene, o, dir);
      depth.at(u, v) = t ? *t : 0.0;
    }
  });
  return depth;
}

inline constexpr double kOcclusionSlack = 1e-6;

/// True when the open segment from `from` to `to` passes through an obstacle.
inline bool segment_occluded(const Scene& scene, const Vec3& from, const Vec3& to) {
  const Vec3 dir = to - from;
  const double length = dir.norm();
  if (length <= kOcclusionSlack) return false;
  const Vec3 unit = dir / length;
  for (const auto& o : scene.obstacles) {
    const auto hit = intersect_ray_box(from, unit, o.box);
    if (hit && hit->exit > kOcclusionSlack && hit->enter < length - kOcclusionSlack) return true;
  }
  return false;
}

/// Indices of samples whose back-projected target point is seen by the
/// context camera, decided by analytic ray casting instead of depth maps.
inline std::vector<std::uint32_t> oracle_visibility(const Scene& scene, const SampleSet& samples, const Frame& target,
                                                    const Frame& context) {
  std::vector<std::uint32_t> visible;
  const Vec3 eye = context.pose.center();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples.pixels[i];
    const double d = target.depth.at(p.u, p.v);
    if (!(d > 0.0)) continue;
    const Vec3 x = back_project(p.u, p.v, d, target.pose, target.intrinsics);
    const Projection proj = project(x, context.pose, context.intrinsics);
    if (!proj.ok()) continue;
    const int pu = proj.pixel_u(), pv = proj.pixel_v();
    if (pu < 0 || pv < 0 || pu >= context.intrinsics.width || pv >= context.intrinsics.height) continue;
    if (segment_occluded(scene, eye, x)) continue;
    visible.push_back(static_cast<std::uint32_t>(i));
  }
  return visible;
}

struct TrajectoryPose {
  int id = 0;
  CameraPose pose;
};

using Trajectory = std::vector<TrajectoryPose>;

enum class TrajectoryPattern { Orbit, RandomWalk };

inline constexpr double kOrbitHeight = 1.6;

inline Vec3 orbit_look_target(const Scene& scene) { return scene.room.center(); }

/// Orbit: evenly spaced cameras on a horizontal circle around the room center,
/// each looking at the center. Random walk: collision-free steps with jittered
/// heading and a slight downward pitch.
inline Trajectory sample_trajectory(const Scene& scene, int n, std::uint64_t seed, TrajectoryPattern pattern) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "frame count must be >= 0");
  std::mt19937_64 rng(seed);
  auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  Trajectory traj;
  traj.reserve(n);

  if (pattern == TrajectoryPattern::Orbit) {
    const Vec3 c = orbit_look_target(scene);
    const double radius = 0.35 * std::min(scene.room.extent().x(), scene.room.extent().y());
    const double phase = uni(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < n; ++i) {
      const double a = phase + 2.0 * std::numbers::pi * i / n;
      const Vec3 eye(c.x() + radius * std::cos(a), c.y() + radius * std::sin(a), kOrbitHeight);
      if (!scene.is_free(eye)) fail(ErrorCode::InvalidArgument, "orbit passes through an obstacle");
      traj.push_back({i, look_at(eye, c)});
    }
    return traj;
  }

  constexpr double kMargin = 0.3;
  constexpr double kStep = 0.3;
  Vec3 eye;
  int tries = 0;
  do {
    if (++tries > 10000) fail(ErrorCode::InvalidArgument, "no free space for a random walk");
    eye = Vec3(uni(scene.room.min.x(), scene.room.max.x()), uni(scene.room.min.y(), scene.room.max.y()),
               uni(1.2, 1.8));
  } while (!scene.is_free(eye, kMargin));
  double yaw = uni(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    const double pitch = uni(-20.0, 5.0) * kDegToRad;
    const Vec3 forward(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch));
    traj.push_back({i, look_at(eye, eye + forward)});
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double heading = uni(-std::numbers::pi, std::numbers::pi);
      const Vec3 next = eye + kStep * Vec3(std::cos(heading), std::sin(heading), uni(-0.2, 0.2));
      if (scene.is_free(next, kMargin) && next.z() > 1.0 && next.z() < 2.0) {
        eye = next;
        break;
      }
    }
    yaw += uni(-30.0, 30.0) * kDegToRad;
  }
  return traj;
}

/// Orbit intrinsics shared by synthetic scenes: ~70 degree horizontal FOV.
inline CameraIntrinsics default_synth_intrinsics(int width = 80, int height = 60) {
  const double f = 0.5 * width / std::tan(35.0 * kDegToRad);
  return {f, f, 0.5 * width, 0.5 * height, width, height};
}

/// Renders every trajectory pose into a Frame.
inline std::vector<Frame> render_frames(const Scene& scene, const Trajectory& traj, const CameraIntrinsics& k,
                                        int threads = 1) {
  std::vector<Frame> frames(traj.size());
  parallel_for(traj.size(), threads, [&](std::size_t i) {
    frames[i] = Frame{traj[i].id, traj[i].pose, k, render_depth(scene, traj[i].pose, k, k.width, k.height)};
  });
  return frames;
}

}  // namespace camcue
