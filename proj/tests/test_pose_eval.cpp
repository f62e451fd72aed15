#include <gtest/gtest.h>

#include "support.hpp"

namespace camcue {
namespace {

PoseErrorSample sample_with(double rot_deg, double trans) { return {rot_deg, trans, 0.0}; }

TEST(PoseErrors, ExactPredictionIsPerfect) {
  std::mt19937_64 rng(80);
  std::vector<PoseErrorSample> errs;
  for (int i = 0; i < 50; ++i) {
    const auto gt = testing::random_pose(rng);
    errs.push_back(pose_errors(RawPose(gt.matrix()), gt));
    EXPECT_LT(errs.back().rot_err_deg, 1e-5);
    EXPECT_LT(errs.back().trans_err, 1e-12);
  }
  const auto r = accuracy_report(errs);
  EXPECT_EQ(r.n, 50u);
  for (const auto& [t, pct] : r.rot) EXPECT_EQ(pct, 100.0);
  for (const auto& [t, pct] : r.trans) EXPECT_EQ(pct, 100.0);
}

TEST(PoseErrors, TwelveDegreesAndTwentyCentimeters) {
  const CameraPose gt = look_at(Vec3(1, 2, 1.5), Vec3(4, 3, 1.0));
  Mat4 pred = gt.matrix();
  pred.topLeftCorner<3, 3>() = gt.rotation() * rotation_about_axis(Vec3(1, 2, 3), 12.0 * kDegToRad);
  pred.block<3, 1>(0, 3) += Vec3(0.0, 0.12, 0.16);
  const auto e = pose_errors(RawPose(pred), gt);
  EXPECT_NEAR(e.rot_err_deg, 12.0, 1e-9);
  EXPECT_NEAR(e.trans_err, 0.2, 1e-12);
  const auto r = accuracy_report({e});
  EXPECT_EQ(r.rot_at(5), 0.0);
  EXPECT_EQ(r.rot_at(10), 0.0);
  EXPECT_EQ(r.rot_at(20), 100.0);
  EXPECT_EQ(r.trans_at(0.1), 0.0);
  EXPECT_EQ(r.trans_at(0.3), 100.0);
  EXPECT_EQ(r.trans_at(0.5), 100.0);
}

TEST(PoseErrors, ScaledRotationBlockProjectsBack) {
  std::mt19937_64 rng(81);
  for (int i = 0; i < 50; ++i) {
    const auto gt = testing::random_pose(rng);
    Mat4 pred = gt.matrix();
    pred.topLeftCorner<3, 3>() *= 1.3;
    const auto e = pose_errors(RawPose(pred), gt);
    EXPECT_LT(e.rot_err_deg, 1e-5);
    EXPECT_EQ(e.trans_err, 0.0);
    EXPECT_NEAR(e.raw_rot_frobenius, 0.3 * std::sqrt(3.0), 1e-12);
  }
}

TEST(PoseErrors, MatchesAxisAngleOracle) {
  std::mt19937_64 rng(82);
  for (int i = 0; i < 200; ++i) {
    const auto gt = testing::random_pose(rng);
    const auto pr = testing::random_pose(rng);
    const auto e = pose_errors(RawPose(pr.matrix()), gt);
    const double oracle = testing::angle_from_axis_angle_deg(pr.rotation().transpose() * gt.rotation());
    EXPECT_NEAR(e.rot_err_deg, oracle, 1e-6);
    EXPECT_NEAR(e.trans_err, (pr.translation() - gt.translation()).norm(), 1e-12);
  }
}

TEST(PoseErrors, SingularRotation) {
  const CameraPose gt;
  Mat4 pred = Mat4::Identity();
  pred.topLeftCorner<3, 3>().setZero();
  EXPECT_CODE(pose_errors(RawPose(pred), gt), ErrorCode::SingularRotation);
  pred.topLeftCorner<3, 3>() << 1, 0, 0, 0, 1, 0, 0, 0, 0;
  EXPECT_CODE(pose_errors(RawPose(pred), gt), ErrorCode::SingularRotation);
}

TEST(AccuracyReport, QuartileExample) {
  std::vector<PoseErrorSample> errs;
  for (double d : {4.0, 9.0, 19.0, 30.0}) errs.push_back(sample_with(d, 1.0));
  const auto r = accuracy_report(errs);
  EXPECT_EQ(r.rot_at(5), 25.0);
  EXPECT_EQ(r.rot_at(10), 50.0);
  EXPECT_EQ(r.rot_at(20), 75.0);
  EXPECT_EQ(r.trans_at(0.5), 0.0);
}

TEST(AccuracyReport, ThresholdsAreInclusive) {
  // |(0.1, 0, 0)| is exactly 0.1 in double precision.
  const CameraPose gt;
  Mat4 pred = Mat4::Identity();
  pred(0, 3) = 0.1;
  const auto r = accuracy_report({pose_errors(RawPose(pred), gt), sample_with(5.0, 0.5)});
  EXPECT_EQ(r.trans_at(0.1), 50.0);
  EXPECT_EQ(r.rot_at(5), 100.0);
  EXPECT_EQ(r.trans_at(0.5), 100.0);
}

TEST(AccuracyReport, MonotoneInThreshold) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PoseErrorSample> errs;
    for (int i = 0; i < 37; ++i)
      errs.push_back(sample_with(testing::uniform(rng, 0, 40), testing::uniform(rng, 0, 1)));
    AccuracyThresholds th;
    th.rot_deg = {1, 2, 5, 10, 15, 20, 30};
    th.trans = {0.05, 0.1, 0.3, 0.5, 0.9};
    const auto r = accuracy_report(errs, th);
    for (std::size_t i = 1; i < r.rot.size(); ++i) EXPECT_LE(r.rot[i - 1].second, r.rot[i].second);
    for (std::size_t i = 1; i < r.trans.size(); ++i) EXPECT_LE(r.trans[i - 1].second, r.trans[i].second);
  }
}

TEST(AccuracyReport, EmptySampleSet) { EXPECT_CODE(accuracy_report({}), ErrorCode::EmptySampleSet); }

TEST(AccuracyReport, UnknownThresholdLookup) {
  const auto r = accuracy_report({sample_with(1, 0.01)});
  EXPECT_CODE(r.rot_at(7), ErrorCode::InvalidArgument);
}

TEST(AccuracyReport, JsonFieldNames) {
  const auto j = to_json(accuracy_report({sample_with(4, 0.2), sample_with(25, 0.05)}, {}, "units"));
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["unit"], "units");
  std::vector<std::string> rot_keys, trans_keys;
  for (auto it = j["rot"].begin(); it != j["rot"].end(); ++it) rot_keys.push_back(it.key());
  for (auto it = j["trans"].begin(); it != j["trans"].end(); ++it) trans_keys.push_back(it.key());
  EXPECT_EQ(rot_keys, (std::vector<std::string>{"5", "10", "20"}));
  EXPECT_EQ(trans_keys, (std::vector<std::string>{"0.1", "0.3", "0.5"}));
  EXPECT_EQ(j["rot"]["5"], 50.0);
  EXPECT_EQ(j["trans"]["0.1"], 50.0);
}

}  // namespace
}  // namespace camcue
