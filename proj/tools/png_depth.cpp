#include "png_depth.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "camcue/error.hpp"

namespace camcue::cli {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  *what = msg ? msg : "png error";
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

DepthMap read_png_depth(const std::filesystem::path& path) {
  const std::string where = path.string();
  FilePtr fp(std::fopen(where.c_str(), "rb"));
  if (!fp) fail(ErrorCode::IoError, "cannot open " + where);
  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    fail(ErrorCode::BadMagic, where + ": not a PNG file");

  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
  if (!png) fail(ErrorCode::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::IoError, "png_create_info_struct failed");
  }

  // Everything with a destructor lives above setjmp so longjmp skips nothing.
  std::vector<png_uint_16> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::TruncatedPayload, where + ": " + err);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
  const bool ok = bit_depth == 16 && color_type == PNG_COLOR_TYPE_GRAY && width >= 1 && height >= 1 &&
                  width <= (1u << 20) && height <= (1u << 20);
  if (ok) {
    png_set_swap(png);  // host order on little-endian hosts
    pixels.resize(static_cast<std::size_t>(width) * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r)
      rows[r] = reinterpret_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(r) * width);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) fail(ErrorCode::InvalidValue, where + ": depth PNG must be 16-bit grayscale");

  DepthMap d;
  d.width = static_cast<int>(width);
  d.height = static_cast<int>(height);
  d.values.resize(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) d.values[i] = static_cast<double>(pixels[i]) / 1000.0;
  return d;
}

void write_png_depth(const std::filesystem::path& path, const DepthMap& depth) {
  depth.validate();
  std::vector<png_uint_16> pixels(depth.values.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double mm = std::round(depth.values[i] * 1000.0);
    if (!(mm >= 0.0 && mm <= 65535.0)) fail(ErrorCode::InvalidValue, "depth out of 16-bit millimeter range");
    pixels[i] = static_cast<png_uint_16>(mm);
  }
  const std::string where = path.string();
  FilePtr fp(std::fopen(where.c_str(), "wb"));
  if (!fp) fail(ErrorCode::IoError, "cannot open " + where + " for writing");

  std::vector<png_bytep> rows(static_cast<std::size_t>(depth.height));
  for (int r = 0; r < depth.height; ++r)
    rows[r] = reinterpret_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(r) * depth.width);
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
  if (!png) fail(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::IoError, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::IoError, where + ": " + err);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(depth.width), static_cast<png_uint_32>(depth.height), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

io::DepthFallback png_depth_fallback() {
  return [](const std::filesystem::path& depth_dir, int id) -> std::optional<DepthMap> {
    const auto p = depth_dir / (std::to_string(id) + ".png");
    if (!std::filesystem::exists(p)) return std::nullopt;
    return read_png_depth(p);
  };
}

}  // namespace camcue::cli
