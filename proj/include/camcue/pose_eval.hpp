#pragma once

// Thresholded rotation / translation accuracy over predicted-vs-true poses.

#include <json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "camcue/camera.hpp"
#include "camcue/error.hpp"

namespace camcue {

struct PoseErrorSample {
  double rot_err_deg = 0.0;
  double trans_err = 0.0;
  // Frobenius distance of the unprojected rotation block, for diagnostics.
  double raw_rot_frobenius = 0.0;
};

/// Rotation error is measured after projecting the raw predicted block onto
/// the nearest rotation; translation error is the Euclidean distance.
inline PoseErrorSample pose_errors(const RawPose& pred, const CameraPose& gt) {
  const auto p = decompose(pred);
  const auto g = decompose(gt);
  Mat3 r;
  try {
    r = orthonormalize(p.rotation);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMatrix)
      fail(ErrorCode::SingularRotation, "predicted rotation block is singular");
    throw;
  }
  return {rotation_geodesic_deg(r, g.rotation), (p.translation - g.translation).norm(),
          (p.rotation - g.rotation).norm()};
}

struct AccuracyThresholds {
  std::vector<double> rot_deg{5.0, 10.0, 20.0};
  std::vector<double> trans{0.1, 0.3, 0.5};
};

struct PoseAccuracyReport {
  std::size_t n = 0;
  std::string unit = "m";
  std::vector<std::pair<double, double>> rot;    // (threshold deg, percent)
  std::vector<std::pair<double, double>> trans;  // (threshold, percent)

  double rot_at(double threshold) const { return lookup(rot, threshold); }
  double trans_at(double threshold) const { return lookup(trans, threshold); }

 private:
  static double lookup(const std::vector<std::pair<double, double>>& v, double t) {
    for (const auto& [th, pct] : v)
      if (th == t) return pct;
    fail(ErrorCode::InvalidArgument, "threshold not in report");
  }
};

/// Percentage of samples with error <= threshold (inclusive), per threshold.
inline PoseAccuracyReport accuracy_report(const std::vector<PoseErrorSample>& samples,
                                          const AccuracyThresholds& thresholds = {}, std::string unit = "m") {
  if (samples.empty()) fail(ErrorCode::EmptySampleSet, "accuracy report needs at least one sample");
  PoseAccuracyReport r;
  r.n = samples.size();
  r.unit = std::move(unit);
  const double n = static_cast<double>(samples.size());
  for (double t : thresholds.rot_deg) {
    std::size_t hits = 0;
    for (const auto& s : samples) hits += s.rot_err_deg <= t ? 1 : 0;
    r.rot.emplace_back(t, 100.0 * static_cast<double>(hits) / n);
  }
  for (double t : thresholds.trans) {
    std::size_t hits = 0;
    for (const auto& s : samples) hits += s.trans_err <= t ? 1 : 0;
    r.trans.emplace_back(t, 100.0 * static_cast<double>(hits) / n);
  }
  return r;
}

// Shortest decimal form of a threshold: 5 -> "5", 0.1 -> "0.1".
inline std::string threshold_key(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

inline nlohmann::ordered_json to_json(const PoseAccuracyReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["unit"] = r.unit;
  nlohmann::ordered_json rot = nlohmann::ordered_json::object();
  for (const auto& [t, pct] : r.rot) rot[threshold_key(t)] = pct;
  nlohmann::ordered_json trans = nlohmann::ordered_json::object();
  for (const auto& [t, pct] : r.trans) trans[threshold_key(t)] = pct;
  j["rot"] = std::move(rot);
  j["trans"] = std::move(trans);
  return j;
}

}  // namespace camcue
