#pragma once

// 16-bit grayscale PNG depth (millimeters) ingest for scene directories.

#include <filesystem>

#include "camcue/camera.hpp"
#include "camcue/dataset_io.hpp"

namespace camcue::cli {

DepthMap read_png_depth(const std::filesystem::path& path);

// Values are rounded to whole millimeters; anything above 65.535 m fails.
void write_png_depth(const std::filesystem::path& path, const DepthMap& depth);

// Looks for depth/<id>.png when depth/<id>.ccd is absent.
io::DepthFallback png_depth_fallback();

}  // namespace camcue::cli
