#include <gtest/gtest.h>

#include "support.hpp"

namespace camcue {
namespace {

using testing::random_intrinsics;
using testing::random_pose;
using testing::random_rotation;
using testing::random_unit;
using testing::uniform;

CameraIntrinsics simple_k() { return {100.0, 100.0, 32.0, 24.0, 64, 48}; }

TEST(Intrinsics, ValidatesRanges) {
  EXPECT_NO_THROW(simple_k().validate());
  auto k = simple_k();
  k.fx = 0.0;
  EXPECT_CODE(k.validate(), ErrorCode::NonPositiveFocal);
  k = simple_k();
  k.width = 0;
  EXPECT_CODE(k.validate(), ErrorCode::InvalidArgument);
  k = simple_k();
  k.cx = 65.0;
  EXPECT_CODE(k.validate(), ErrorCode::InvalidArgument);
}

TEST(Intrinsics, ScaledToKeepsFieldOfView) {
  const auto k = simple_k().scaled_to(128, 96);
  EXPECT_DOUBLE_EQ(k.fx, 200.0);
  EXPECT_DOUBLE_EQ(k.cx, 64.0);
  EXPECT_EQ(k.width, 128);
  // Image corners map to the same rays.
  const Vec3 a = pixel_ray_camera(-0.5, -0.5, simple_k());
  const Vec3 b = pixel_ray_camera(-0.5, -0.5, k);
  EXPECT_NEAR((a - b).norm(), 0.0, 1e-15);
}

TEST(Decompose, IdentityAndTranslation) {
  const auto d = decompose(CameraPose::identity());
  EXPECT_EQ(d.rotation, Mat3::Identity());
  EXPECT_EQ(d.translation, Vec3::Zero());
  const auto p = CameraPose::from_rotation_translation(Mat3::Identity(), Vec3(1, 2, 3));
  const auto e = decompose(p);
  EXPECT_EQ(e.rotation, Mat3::Identity());
  EXPECT_EQ(e.translation, Vec3(1, 2, 3));
}

TEST(Decompose, RecomposeIsBitwiseRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_pose(rng);
    const auto d = decompose(p);
    EXPECT_EQ(recompose(d.rotation, d.translation), p.matrix());
  }
}

TEST(Decompose, RawPoseBlocksVerbatim) {
  std::mt19937_64 rng(12);
  Mat4 m;
  testing::fill_random(m, rng, 3.0);
  const auto d = decompose(RawPose(m));
  EXPECT_EQ(d.rotation, (m.topLeftCorner<3, 3>()));
  EXPECT_EQ(d.translation, (m.topRightCorner<3, 1>()));
}

TEST(CameraPose, RejectsNonRigid) {
  Mat4 m = Mat4::Identity();
  m(0, 0) = 1.01;
  EXPECT_CODE(CameraPose::from_matrix(m), ErrorCode::NotARotation);
  m = Mat4::Identity();
  m(3, 0) = 0.5;
  EXPECT_CODE(CameraPose::from_matrix(m), ErrorCode::NotARotation);
  m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = -Mat3::Identity();  // det = -1
  EXPECT_CODE(CameraPose::from_matrix(m), ErrorCode::NotARotation);
}

TEST(RawPose, RejectsNonFinite) {
  Mat4 m = Mat4::Identity();
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_CODE(RawPose{m}, ErrorCode::InvalidValue);
}

TEST(BackProject, PrincipalPointIdentityPose) {
  const auto k = simple_k();
  const Vec3 x = back_project(k.cx - 0.5, k.cy - 0.5, 2.0, CameraPose::identity(), k);
  EXPECT_NEAR((x - Vec3(0, 0, 2)).norm(), 0.0, 1e-15);
}

TEST(BackProject, NonPositiveDepth) {
  EXPECT_CODE(back_project(1, 1, 0.0, CameraPose::identity(), simple_k()), ErrorCode::NonPositiveDepth);
  EXPECT_CODE(back_project(1, 1, -1.0, CameraPose::identity(), simple_k()), ErrorCode::NonPositiveDepth);
}

TEST(BackProject, FormulaMatchesDefinition) {
  std::mt19937_64 rng(13);
  const auto k = random_intrinsics(rng);
  const auto pose = random_pose(rng);
  const double u = 7, v = 3, z = 1.7;
  const Eigen::Vector4d cam(z * (u + 0.5 - k.cx) / k.fx, z * (v + 0.5 - k.cy) / k.fy, z, 1.0);
  const Eigen::Vector4d expected = pose.matrix() * cam;
  EXPECT_NEAR((back_project(u, v, z, pose, k) - expected.head<3>()).norm(), 0.0, 1e-12);
}

TEST(BackProject, WallPlaneOfBoxRoom) {
  // Camera at the room center facing +x toward the wall at x = 5.
  Scene scene;
  scene.room = Box{Vec3(-5, -5, -5), Vec3(5, 5, 5)};
  const auto pose = look_at(Vec3::Zero(), Vec3(1, 0, 0));
  const auto k = simple_k();
  const auto depth = render_depth(scene, pose, k, k.width, k.height);
  for (int v = 0; v < k.height; v += 5)
    for (int u = 0; u < k.width; u += 5) {
      const Vec3 x = back_project(u, v, depth.at(u, v), pose, k);
      EXPECT_NEAR(x.x(), 5.0, 1e-6);
    }
}

TEST(Project, PrincipalPointIdentityPose) {
  const auto k = simple_k();
  const auto p = project(Vec3(0, 0, 2), CameraPose::identity(), k);
  ASSERT_TRUE(p.ok());
  EXPECT_DOUBLE_EQ(p.u, k.cx - 0.5);
  EXPECT_DOUBLE_EQ(p.v, k.cy - 0.5);
  EXPECT_DOUBLE_EQ(p.z, 2.0);
  EXPECT_EQ(p.pixel_u(), 32);
  EXPECT_EQ(p.pixel_v(), 24);
}

TEST(Project, BehindCamera) {
  const auto p = project(Vec3(0, 0, -1), CameraPose::identity(), simple_k());
  EXPECT_EQ(p.status, ProjectionStatus::BehindCamera);
  EXPECT_FALSE(p.ok());
  EXPECT_FALSE(project(Vec3(0, 0, 1e-7), CameraPose::identity(), simple_k()).ok());
}

TEST(Project, RoundTripThousandSamples) {
  std::mt19937_64 rng(14);
  double worst_px = 0.0, worst_z = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto k = random_intrinsics(rng);
    const auto pose = random_pose(rng);
    const double u = uniform(rng, 0, k.width - 1), v = uniform(rng, 0, k.height - 1), z = uniform(rng, 0.05, 20);
    const auto p = project(back_project(u, v, z, pose, k), pose, k);
    ASSERT_TRUE(p.ok());
    worst_px = std::max({worst_px, std::abs(p.u - u), std::abs(p.v - v)});
    worst_z = std::max(worst_z, std::abs(p.z - z));
  }
  EXPECT_LT(worst_px, 1e-9);
  EXPECT_LT(worst_z, 1e-9);
}

TEST(Geodesic, BasicValues) {
  std::mt19937_64 rng(15);
  const Mat3 r = random_rotation(rng);
  EXPECT_NEAR(rotation_geodesic_deg(r, r), 0.0, 1e-9);
  EXPECT_NEAR(rotation_geodesic_deg(Mat3::Identity(), rotation_about_axis(Vec3::UnitZ(), 30 * kDegToRad)), 30.0,
              1e-9);
  EXPECT_NEAR(rotation_geodesic_deg(rotation_about_axis(Vec3::UnitX(), 10 * kDegToRad), Mat3::Identity()), 10.0,
              1e-9);
  EXPECT_NEAR(rotation_geodesic_deg(Mat3::Identity(), rotation_about_axis(Vec3::UnitY(), std::numbers::pi)), 180.0,
              1e-9);
}

TEST(Geodesic, AgreesWithAxisAngleOracle) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 500; ++i) {
    const Mat3 a = random_rotation(rng), b = random_rotation(rng);
    EXPECT_NEAR(rotation_geodesic_deg(a, b), testing::angle_from_axis_angle_deg(a.transpose() * b), 1e-6);
  }
}

TEST(Geodesic, MetricProperties) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const Mat3 a = random_rotation(rng), b = random_rotation(rng), c = random_rotation(rng);
    const double ab = rotation_geodesic_deg(a, b), ba = rotation_geodesic_deg(b, a);
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 180.0);
    EXPECT_LE(ab, rotation_geodesic_deg(a, c) + rotation_geodesic_deg(c, b) + 1e-6);
  }
}

TEST(Geodesic, NotARotation) {
  EXPECT_CODE(rotation_geodesic_deg(2.0 * Mat3::Identity(), Mat3::Identity()), ErrorCode::NotARotation);
}

TEST(Orthonormalize, ExactScaledAndNoisy) {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = random_rotation(rng);
    EXPECT_LT((orthonormalize(r) - r).norm(), 1e-12);
    EXPECT_LT((orthonormalize(1.1 * r) - r).norm(), 1e-9);
    Mat3 noise;
    testing::fill_random(noise, rng, 1.0);
    noise *= 1e-3 / noise.norm();
    const Mat3 q = orthonormalize(r + noise);
    EXPECT_LT((q.transpose() * q - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(q.determinant(), 1.0, 1e-12);
    EXPECT_LT((q - r).norm(), 2e-3);
  }
}

TEST(Orthonormalize, NearestAmongSampledRotations) {
  // The polar factor is at least as close as any rotation in a random probe set.
  std::mt19937_64 rng(19);
  Mat3 m;
  testing::fill_random(m, rng, 1.0);
  if (m.determinant() < 0) m.col(0) *= -1.0;
  const Mat3 q = orthonormalize(m);
  for (int i = 0; i < 2000; ++i) EXPECT_LE((q - m).norm(), (random_rotation(rng) - m).norm() + 1e-12);
}

TEST(Orthonormalize, ReflectionGetsDetPlusOne) {
  Mat3 m = Mat3::Identity();
  m(2, 2) = -0.5;
  const Mat3 q = orthonormalize(m);
  EXPECT_NEAR(q.determinant(), 1.0, 1e-12);
}

TEST(Orthonormalize, Singular) {
  EXPECT_CODE(orthonormalize(Mat3::Zero()), ErrorCode::SingularMatrix);
  Mat3 m = Mat3::Identity();
  m(2, 2) = 0.0;
  EXPECT_CODE(orthonormalize(m), ErrorCode::SingularMatrix);
}

TEST(PoseAlgebra, InverseAndCompose) {
  std::mt19937_64 rng(20);
  EXPECT_EQ(pose_inverse(CameraPose::identity()).matrix(), Mat4::Identity());
  for (int i = 0; i < 100; ++i) {
    const auto a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    EXPECT_LT((pose_compose(a, pose_inverse(a)).matrix() - Mat4::Identity()).norm(), 1e-12 * 10);
    const Mat4 left = pose_compose(pose_compose(a, b), c).matrix();
    const Mat4 right = pose_compose(a, pose_compose(b, c)).matrix();
    EXPECT_LT((left - right).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(LookAt, ForwardAndDown) {
  const auto p = look_at(Vec3(1, 1, 1.5), Vec3(3, 1, 1.5));
  EXPECT_NEAR((p.rotation().col(2) - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((p.rotation().col(1) - Vec3(0, 0, -1)).norm(), 0.0, 1e-15);
  EXPECT_TRUE(is_rotation(p.rotation(), 1e-12));
  EXPECT_CODE(look_at(Vec3::Zero(), Vec3(0, 0, 1)), ErrorCode::InvalidArgument);
}

TEST(DepthMap, ValidateRejectsNegativeAndNaN) {
  DepthMap d(2, 1);
  d.values = {1.0, -1.0};
  EXPECT_CODE(d.validate(), ErrorCode::InvalidValue);
  d.values[1] = std::numeric_limits<double>::infinity();
  EXPECT_CODE(d.validate(), ErrorCode::InvalidValue);
  d.values = {1.0};
  EXPECT_CODE(d.validate(), ErrorCode::ShapeMismatch);
}

}  // namespace
}  // namespace camcue
