#pragma once

// Pinhole camera and SE(3) primitives. Poses are camera-to-world; the camera
// frame is x right, y down, z forward. Pixel (u, v) has its center at the
// continuous image coordinate (u + 0.5, v + 0.5).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "camcue/error.hpp"

namespace camcue {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  int width = 1;
  int height = 1;

  void validate() const {
    if (!(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) && std::isfinite(cy)))
      fail(ErrorCode::InvalidArgument, "intrinsics contain non-finite values");
    if (!(fx > 0.0 && fy > 0.0)) fail(ErrorCode::NonPositiveFocal, "focal lengths must be positive");
    if (width < 1 || height < 1) fail(ErrorCode::InvalidArgument, "image size must be at least 1x1");
    if (cx < 0.0 || cx > width || cy < 0.0 || cy > height)
      fail(ErrorCode::InvalidArgument, "principal point outside the image");
  }

  // Same field of view sampled on a different pixel grid.
  CameraIntrinsics scaled_to(int new_width, int new_height) const {
    const double sx = static_cast<double>(new_width) / width;
    const double sy = static_cast<double>(new_height) / height;
    return {fx * sx, fy * sy, cx * sx, cy * sy, new_width, new_height};
  }

  bool operator==(const CameraIntrinsics&) const = default;
};

namespace detail {

inline double orthonormality_error(const Mat3& r) {
  const double gram = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(gram, std::abs(r.determinant() - 1.0));
}

inline bool has_canonical_last_row(const Mat4& m) {
  return m(3, 0) == 0.0 && m(3, 1) == 0.0 && m(3, 2) == 0.0 && m(3, 3) == 1.0;
}

}  // namespace detail

inline Mat4 recompose(const Mat3& rotation, const Vec3& translation) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

/// Rigid camera-to-world transform. Construction validates the rotation block
/// and the (0, 0, 0, 1) bottom row.
class CameraPose {
 public:
  static constexpr double kRigidTolerance = 1e-9;

  CameraPose() : m_(Mat4::Identity()) {}

  static CameraPose identity() { return CameraPose(); }

  static CameraPose from_matrix(const Mat4& m, double tolerance = kRigidTolerance) {
    if (!m.allFinite()) fail(ErrorCode::InvalidArgument, "pose matrix has non-finite entries");
    if (!detail::has_canonical_last_row(m)) fail(ErrorCode::NotARotation, "pose bottom row must be (0, 0, 0, 1)");
    if (detail::orthonormality_error(m.topLeftCorner<3, 3>()) > tolerance)
      fail(ErrorCode::NotARotation, "pose rotation block is not orthonormal");
    CameraPose p;
    p.m_ = m;
    return p;
  }

  static CameraPose from_rotation_translation(const Mat3& rotation, const Vec3& translation,
                                              double tolerance = kRigidTolerance) {
    return from_matrix(recompose(rotation, translation), tolerance);
  }

  const Mat4& matrix() const { return m_; }
  Mat3 rotation() const { return m_.topLeftCorner<3, 3>(); }
  Vec3 translation() const { return m_.topRightCorner<3, 1>(); }
  Vec3 center() const { return translation(); }

  bool operator==(const CameraPose& other) const { return m_ == other.m_; }

 private:
  Mat4 m_;
};

/// Unconstrained 4x4 matrix, e.g. a regressed pose before projection.
class RawPose {
 public:
  RawPose() : m_(Mat4::Identity()) {}
  explicit RawPose(const Mat4& m) : m_(m) {
    if (!m.allFinite()) fail(ErrorCode::InvalidValue, "raw pose has non-finite entries");
  }
  explicit RawPose(const CameraPose& pose) : m_(pose.matrix()) {}

  const Mat4& matrix() const { return m_; }

 private:
  Mat4 m_;
};

struct PoseDecomposition {
  Mat3 rotation;
  Vec3 translation;
};

inline PoseDecomposition decompose(const Mat4& m) {
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}
inline PoseDecomposition decompose(const CameraPose& p) { return decompose(p.matrix()); }
inline PoseDecomposition decompose(const RawPose& p) { return decompose(p.matrix()); }

/// Row-major per-pixel depth in meters; 0 marks an invalid pixel.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  DepthMap() = default;
  DepthMap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w < 0 || h < 0) fail(ErrorCode::InvalidArgument, "negative depth map size");
  }

  double at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
  double& at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }
  bool in_bounds(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
  bool valid(int u, int v) const { return at(u, v) > 0.0; }

  void validate() const {
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      fail(ErrorCode::ShapeMismatch, "depth value count does not match dimensions");
    for (double d : values)
      if (!std::isfinite(d) || d < 0.0) fail(ErrorCode::InvalidValue, "depth values must be finite and >= 0");
  }

  bool operator==(const DepthMap&) const = default;
};

// Camera-frame direction through pixel (u, v) with unit z component.
inline Vec3 pixel_ray_camera(double u, double v, const CameraIntrinsics& k) {
  return {(u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0};
}

inline Vec3 back_project(double u, double v, double depth, const CameraPose& pose, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) fail(ErrorCode::NonPositiveDepth, "back_project needs depth > 0");
  const Vec3 cam = depth * pixel_ray_camera(u, v, k);
  return pose.rotation() * cam + pose.translation();
}

enum class ProjectionStatus { Ok, BehindCamera };

struct Projection {
  double u = 0.0;  // pixel-index coordinates: integer values are pixel centers
  double v = 0.0;
  double z = 0.0;  // camera-frame depth
  ProjectionStatus status = ProjectionStatus::Ok;

  bool ok() const { return status == ProjectionStatus::Ok; }
  // Index of the pixel containing the projected point.
  int pixel_u() const { return static_cast<int>(std::floor(u + 0.5)); }
  int pixel_v() const { return static_cast<int>(std::floor(v + 0.5)); }
};

inline constexpr double kBehindCameraEpsilon = 1e-6;

inline Projection project(const Vec3& world, const CameraPose& pose, const CameraIntrinsics& k) {
  const Vec3 cam = pose.rotation().transpose() * (world - pose.translation());
  Projection out;
  out.z = cam.z();
  if (cam.z() <= kBehindCameraEpsilon) {
    out.status = ProjectionStatus::BehindCamera;
    return out;
  }
  out.u = k.fx * cam.x() / cam.z() + k.cx - 0.5;
  out.v = k.fy * cam.y() / cam.z() + k.cy - 0.5;
  return out;
}

inline bool is_rotation(const Mat3& r, double tolerance = 1e-6) {
  return r.allFinite() && detail::orthonormality_error(r) <= tolerance;
}

inline Mat3 rotation_about_axis(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

/// Angle of the relative rotation RaᵀRb in degrees, in [0, 180].
inline double rotation_geodesic_deg(const Mat3& ra, const Mat3& rb) {
  if (!is_rotation(ra) || !is_rotation(rb)) fail(ErrorCode::NotARotation, "geodesic needs orthonormal inputs");
  const Mat3 rel = ra.transpose() * rb;
  // atan2 of the (sin, cos) pair equals arccos((tr - 1) / 2) for exact
  // rotations but stays well conditioned near 0 and 180 degrees.
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Vec3 skew(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const double s = std::min(1.0, 0.5 * skew.norm());
  return std::atan2(s, c) * kRadToDeg;
}

/// Nearest rotation in Frobenius norm (polar factor with det = +1).
inline Mat3 orthonormalize(const Mat3& m) {
  if (!m.allFinite()) fail(ErrorCode::SingularMatrix, "matrix has non-finite entries");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  if (!(sigma(0) > 0.0) || sigma(2) <= 1e-12 * sigma(0)) fail(ErrorCode::SingularMatrix, "matrix is singular");
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return u * d * v.transpose();
}

inline CameraPose pose_inverse(const CameraPose& pose) {
  const Mat3 rt = pose.rotation().transpose();
  return CameraPose::from_matrix(recompose(rt, -rt * pose.translation()), 1e-6);
}

inline CameraPose pose_compose(const CameraPose& a, const CameraPose& b) {
  Mat4 m = a.matrix() * b.matrix();
  m.row(3) << 0.0, 0.0, 0.0, 1.0;
  return CameraPose::from_matrix(m, 1e-6);
}

/// Camera at `eye` looking at `target`; `up` is the world up direction.
inline CameraPose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ()) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-12) fail(ErrorCode::InvalidArgument, "look_at direction parallel to up");
  right.normalize();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return CameraPose::from_rotation_translation(r, eye);
}

}  // namespace camcue
