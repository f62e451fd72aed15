#pragma once

#include <vector>

#include "camcue/camera.hpp"

namespace camcue {

/// One posed RGB-D view; only depth is needed here.
struct Frame {
  int id = 0;
  CameraPose pose;
  CameraIntrinsics intrinsics;
  DepthMap depth;

  void validate() const {
    intrinsics.validate();
    depth.validate();
    if (depth.width != intrinsics.width || depth.height != intrinsics.height)
      fail(ErrorCode::ShapeMismatch, "depth size does not match intrinsics");
  }
};

struct PixelSample {
  int u = 0;
  int v = 0;
  bool operator==(const PixelSample&) const = default;
};

/// Target-view pixels with valid depth, in row-major order.
struct SampleSet {
  std::vector<PixelSample> pixels;

  std::size_t size() const { return pixels.size(); }
  bool empty() const { return pixels.empty(); }
};

}  // namespace camcue
