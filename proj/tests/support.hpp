#pragma once

// Shared random generators and independent oracles for the test suites.

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <unistd.h>
#include <random>
#include <set>
#include <vector>

#include "camcue/camcue.hpp"

// Asserts that `stmt` throws camcue::Error with the given code.
#define EXPECT_CODE(stmt, expected)                       \
  do {                                                    \
    try {                                                 \
      stmt;                                               \
      ADD_FAILURE() << "expected " << to_string(expected); \
    } catch (const Error& e) {                            \
      EXPECT_EQ(e.code(), expected) << e.what();          \
    }                                                     \
  } while (0)

namespace camcue::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  return rotation_about_axis(random_unit(rng), uniform(rng, 0.0, std::numbers::pi));
}

inline CameraPose random_pose(std::mt19937_64& rng, double extent = 5.0) {
  return CameraPose::from_rotation_translation(
      random_rotation(rng), Vec3(uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, -extent, extent)));
}

inline CameraIntrinsics random_intrinsics(std::mt19937_64& rng) {
  CameraIntrinsics k;
  k.width = static_cast<int>(uniform(rng, 16, 640));
  k.height = static_cast<int>(uniform(rng, 16, 480));
  k.fx = uniform(rng, 20.0, 800.0);
  k.fy = k.fx * uniform(rng, 0.8, 1.2);
  k.cx = uniform(rng, 0.3, 0.7) * k.width;
  k.cy = uniform(rng, 0.3, 0.7) * k.height;
  return k;
}

template <typename M>
void fill_random(M& m, std::mt19937_64& rng, double scale = 1.0) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -scale, scale);
}

// Naive translation/rotation MSE straight from the definition.
inline double naive_pose_loss(const Mat4& pred, const Mat4& gt) {
  double t = 0.0, r = 0.0;
  for (int i = 0; i < 3; ++i) {
    t += (pred(i, 3) - gt(i, 3)) * (pred(i, 3) - gt(i, 3));
    for (int j = 0; j < 3; ++j) r += (pred(i, j) - gt(i, j)) * (pred(i, j) - gt(i, j));
  }
  return t / 3.0 + r / 9.0;
}

// Axis-angle recovered from the rotation's skew part and trace, in degrees.
inline double angle_from_axis_angle_deg(const Mat3& r) {
  Eigen::AngleAxisd aa(r);
  return std::abs(aa.angle()) * kRadToDeg;
}

struct RoundResult {
  std::size_t best_gain = 0;
  std::vector<int> argmax_ids;
};

// Exhaustive scan of one greedy round: best marginal gain and every id achieving it.
inline RoundResult exhaustive_round(const std::vector<int>& ids, const std::vector<std::set<std::uint32_t>>& sets,
                                    const std::set<std::uint32_t>& covered, const std::set<int>& used) {
  RoundResult r;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (used.count(ids[i])) continue;
    std::size_t gain = 0;
    for (auto p : sets[i]) gain += covered.count(p) ? 0 : 1;
    if (r.argmax_ids.empty() || gain > r.best_gain) {
      r.best_gain = gain;
      r.argmax_ids.clear();
    }
    if (gain == r.best_gain) r.argmax_ids.push_back(ids[i]);
  }
  return r;
}

// Best achievable coverage over all k-subsets; used to sanity check greedy on tiny instances.
inline std::size_t best_k_coverage(const std::vector<std::set<std::uint32_t>>& sets, int k) {
  const int n = static_cast<int>(sets.size());
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::set<std::uint32_t> u;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) u.insert(sets[i].begin(), sets[i].end());
    best = std::max(best, u.size());
  }
  return best;
}

inline Frame make_frame(int id, const CameraPose& pose, const CameraIntrinsics& k, const Scene& scene) {
  return Frame{id, pose, k, render_depth(scene, pose, k, k.width, k.height)};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("camcue_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace camcue::testing
