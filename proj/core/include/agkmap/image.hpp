#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace agkmap {

// 8-bit interleaved pixels, 1 (grey) or 3 (RGB) channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  [[nodiscard]] std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  [[nodiscard]] std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

Image make_image(int width, int height, int channels);

/// Luma (BT.601 weights) for RGB, identity for grey; returns 0..255 values.
std::vector<double> to_grey(const Image& image);

// Binary netpbm (P5 grey / P6 RGB, maxval <= 255). Throws std::runtime_error.
Image read_netpbm(const std::filesystem::path& path);
void write_netpbm(const std::filesystem::path& path, const Image& image);

struct MaskRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

/// Fills the rectangle (clipped to the image) with black.
void fill_black(Image& image, const MaskRect& rect);

}  // namespace agkmap
