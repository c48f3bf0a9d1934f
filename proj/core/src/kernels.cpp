#include "agkmap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "agkmap/summation.hpp"

namespace agkmap {

void KernelConfig::validate() const {
  auto require_positive = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string("kernel config: ") + name + " must be positive and finite");
    }
  };
  require_positive(sigma_basic, "sigma_basic");
  require_positive(a, "a");
  require_positive(aspect_ratio, "aspect_ratio");
  require_positive(fwhm_const, "fwhm_const");
  require_positive(alpha, "alpha");
  require_positive(trunc_mult, "trunc_mult");
  if (aspect_ratio < 1.0) throw std::invalid_argument("kernel config: aspect_ratio must be >= 1");
}

double KernelPatch::sum() const { return compensated_sum(values); }

KernelPatch KernelPatch::clipped(int image_width, int image_height) const {
  const int x0 = std::max(origin_x, 0);
  const int y0 = std::max(origin_y, 0);
  const int x1 = std::min(origin_x + width, image_width);
  const int y1 = std::min(origin_y + height, image_height);

  KernelPatch out;
  out.origin_x = x0;
  out.origin_y = y0;
  if (x1 <= x0 || y1 <= y0) return out;
  if (x0 == origin_x && y0 == origin_y && x1 == origin_x + width && y1 == origin_y + height) return *this;

  out.width = x1 - x0;
  out.height = y1 - y0;
  out.values.reserve(static_cast<std::size_t>(out.width) * out.height);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) out.values.push_back(at(x, y));
  }
  return out;
}

bool KernelPatch::normalize() {
  const double total = sum();
  if (!(total > 0.0)) return false;
  for (double& v : values) v /= total;
  return true;
}

double line_sigma(std::size_t point_index, std::size_t n_points, const KernelConfig& config) {
  const std::size_t from_end = n_points - 1 - point_index;
  return config.sigma_basic + config.a * static_cast<double>(std::min(point_index, from_end));
}

AgkSigmas agk_sigmas(const LineLabel& line, const KernelConfig& config) {
  if (line.degenerate()) throw std::invalid_argument("zero-length label");
  const double sigma1 = line_length(line) / 2.0 * (config.fwhm_const / config.alpha);
  return {sigma1, sigma1 / config.aspect_ratio};
}

int isotropic_half_width(double sigma, const KernelConfig& config) {
  return static_cast<int>(std::ceil(config.trunc_mult * sigma));
}

int agk_half_width(double sigma1, double window_len, const KernelConfig& config) {
  return static_cast<int>(std::ceil(std::max(window_len / 2.0, config.trunc_mult * sigma1)));
}

namespace {

// All integer pixels p with |p - mu| <= half_width on each axis. Defined
// without rounding mu so the window is mirror symmetric about mu.
KernelPatch empty_window(Point2 mu, int half_width) {
  KernelPatch patch;
  patch.origin_x = static_cast<int>(std::ceil(mu.x - half_width));
  patch.origin_y = static_cast<int>(std::ceil(mu.y - half_width));
  patch.width = static_cast<int>(std::floor(mu.x + half_width)) - patch.origin_x + 1;
  patch.height = static_cast<int>(std::floor(mu.y + half_width)) - patch.origin_y + 1;
  patch.values.resize(static_cast<std::size_t>(patch.width) * patch.height);
  return patch;
}

void normalize_or_collapse(KernelPatch& patch, Point2 mu) {
  if (patch.normalize()) return;
  // Underflow everywhere (sigma far below a pixel): all mass on the pixel
  // nearest mu.
  std::fill(patch.values.begin(), patch.values.end(), 0.0);
  const int cx = std::clamp(static_cast<int>(std::lround(mu.x)) - patch.origin_x, 0, patch.width - 1);
  const int cy = std::clamp(static_cast<int>(std::lround(mu.y)) - patch.origin_y, 0, patch.height - 1);
  patch.values[static_cast<std::size_t>(cy) * patch.width + cx] = 1.0;
}

template <typename Fn>
KernelPatch evaluate_window(Point2 mu, int half_width, Fn&& weight) {
  KernelPatch patch = empty_window(mu, half_width);
  std::size_t k = 0;
  for (int row = 0; row < patch.height; ++row) {
    const double dy = patch.origin_y + row - mu.y;
    for (int col = 0; col < patch.width; ++col) {
      const double dx = patch.origin_x + col - mu.x;
      patch.values[k++] = weight(dx, dy);
    }
  }
  normalize_or_collapse(patch, mu);
  return patch;
}

}  // namespace

KernelPatch isotropic_patch(Point2 mu, double sigma, int half_width) {
  if (!(sigma > 0.0)) throw std::invalid_argument("isotropic_patch: sigma must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  KernelPatch patch = empty_window(mu, std::max(half_width, 0));
  // exp(-(dx^2 + dy^2) k) = exp(-dx^2 k) * exp(-dy^2 k)
  std::vector<double> gx(static_cast<std::size_t>(patch.width));
  for (int col = 0; col < patch.width; ++col) {
    const double dx = patch.origin_x + col - mu.x;
    gx[static_cast<std::size_t>(col)] = std::exp(-dx * dx * inv);
  }
  std::size_t k = 0;
  for (int row = 0; row < patch.height; ++row) {
    const double dy = patch.origin_y + row - mu.y;
    const double gy = std::exp(-dy * dy * inv);
    for (int col = 0; col < patch.width; ++col) patch.values[k++] = gy * gx[static_cast<std::size_t>(col)];
  }
  normalize_or_collapse(patch, mu);
  return patch;
}

KernelPatch isotropic_patch(Point2 mu, double sigma, const KernelConfig& config) {
  return isotropic_patch(mu, sigma, isotropic_half_width(sigma, config));
}

KernelPatch agk_patch(Point2 mu, double sigma1, double sigma2, double theta, int half_width) {
  if (!(sigma2 > 0.0) || sigma1 < sigma2) {
    throw std::invalid_argument("agk_patch: require sigma1 >= sigma2 > 0");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double inv1 = 1.0 / (2.0 * sigma1 * sigma1);
  const double inv2 = 1.0 / (2.0 * sigma2 * sigma2);
  return evaluate_window(mu, std::max(half_width, 0), [=](double dx, double dy) {
    // offsets expressed in the line frame (rotation by -theta)
    const double u = c * dx + s * dy;
    const double v = -s * dx + c * dy;
    return std::exp(-(u * u * inv1 + v * v * inv2));
  });
}

KernelPatch agk_patch(Point2 mu, double sigma1, double sigma2, double theta, const KernelConfig& config,
                      double window_len) {
  return agk_patch(mu, sigma1, sigma2, theta, agk_half_width(sigma1, window_len, config));
}

}  // namespace agkmap
