#include "agkmap/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

namespace agkmap {

Image make_image(int width, int height, int channels) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
  if (channels != 1 && channels != 3) throw std::invalid_argument("image must have 1 or 3 channels");
  Image img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.pixels.assign(static_cast<std::size_t>(width) * height * channels, 0);
  return img;
}

std::vector<double> to_grey(const Image& image) {
  const auto n = static_cast<std::size_t>(image.width) * image.height;
  std::vector<double> grey(n);
  if (image.channels == 1) {
    std::copy(image.pixels.begin(), image.pixels.begin() + static_cast<std::ptrdiff_t>(n), grey.begin());
    return grey;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto* px = &image.pixels[i * 3];
    grey[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
  }
  return grey;
}

namespace {

int read_header_int(std::istream& in, const std::filesystem::path& path) {
  int c = in.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
    c = in.peek();
  }
  int value = -1;
  if (!(in >> value) || value < 0) throw std::runtime_error(path.string() + ": malformed netpbm header");
  return value;
}

}  // namespace

Image read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  int channels = 0;
  if (magic == "P5") channels = 1;
  else if (magic == "P6") channels = 3;
  else throw std::runtime_error(path.string() + ": not a binary PGM/PPM file");

  const int width = read_header_int(in, path);
  const int height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (width == 0 || height == 0) throw std::runtime_error(path.string() + ": empty image");
  if (maxval == 0 || maxval > 255) throw std::runtime_error(path.string() + ": only 8-bit netpbm is supported");
  in.get();  // single whitespace before the raster

  Image img = make_image(width, height, channels);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw std::runtime_error(path.string() + ": truncated raster");
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(std::min(255, p * 255 / maxval));
  }
  return img;
}

void write_netpbm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << (image.channels == 1 ? "P5" : "P6") << '\n' << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void fill_black(Image& image, const MaskRect& rect) {
  const int x0 = std::clamp(rect.x, 0, image.width);
  const int y0 = std::clamp(rect.y, 0, image.height);
  const int x1 = std::clamp(rect.x + rect.w, 0, image.width);
  const int y1 = std::clamp(rect.y + rect.h, 0, image.height);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      for (int c = 0; c < image.channels; ++c) image.at(x, y, c) = 0;
    }
  }
}

}  // namespace agkmap
