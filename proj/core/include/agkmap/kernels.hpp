#pragma once

#include <vector>

#include "agkmap/annotations.hpp"

namespace agkmap {

// Kernel hyperparameters. Defaults are the values used for the manatee
// experiments.
struct KernelConfig {
  double sigma_basic = 15.0;
  double a = 0.2;             // expanding factor of the line sigma schedule
  double aspect_ratio = 4.0;  // object length / width
  double fwhm_const = 2.355;  // ~ 2 sqrt(2 ln 2)
  double alpha = 4.0;         // FWHM penalizer
  double trunc_mult = 3.0;    // window half-width in sigma units

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

// A truncated, normalized kernel. origin_x/origin_y are the image
// coordinates of values[0]; values are row-major.
struct KernelPatch {
  int origin_x = 0;
  int origin_y = 0;
  int width = 0;
  int height = 0;
  std::vector<double> values;

  [[nodiscard]] double at(int x, int y) const {
    return values[static_cast<std::size_t>(y - origin_y) * width + (x - origin_x)];
  }
  [[nodiscard]] bool contains(int x, int y) const noexcept {
    return x >= origin_x && y >= origin_y && x < origin_x + width && y < origin_y + height;
  }
  [[nodiscard]] double sum() const;

  // Restrict to [0, image_width) x [0, image_height). Mass is not
  // renormalized; an empty intersection yields an empty patch.
  [[nodiscard]] KernelPatch clipped(int image_width, int image_height) const;
  // Scale so the values sum to one. Returns false if the sum is zero.
  bool normalize();
};

struct AgkSigmas {
  double sigma1 = 0.0;  // along the line
  double sigma2 = 0.0;  // across the line
};

/// sigma_basic + a * (steps to the nearer endpoint) for point `point_index`
/// of `n_points` samples along a line.
double line_sigma(std::size_t point_index, std::size_t n_points, const KernelConfig& config);

/// sigma1 = (length / 2) * (fwhm / alpha), sigma2 = sigma1 / aspect_ratio.
/// Throws std::invalid_argument("zero-length label") for a == b.
AgkSigmas agk_sigmas(const LineLabel& line, const KernelConfig& config);

/// Integer half-width used for an isotropic kernel: ceil(trunc_mult * sigma).
int isotropic_half_width(double sigma, const KernelConfig& config);

/// Integer half-width for an AGK kernel: ceil(max(window_len / 2, trunc_mult * sigma1)).
int agk_half_width(double sigma1, double window_len, const KernelConfig& config);

/// Isotropic Gaussian over every integer pixel within the half-width of mu
/// (per axis), normalized to sum 1.
KernelPatch isotropic_patch(Point2 mu, double sigma, const KernelConfig& config);
KernelPatch isotropic_patch(Point2 mu, double sigma, int half_width);

/// Anisotropic Gaussian with sigma1 along direction theta and sigma2 across
/// it, evaluated analytically on the rotated pixel offsets and normalized.
/// `window_len` is the line length the window must at least cover (0 for
/// none).
KernelPatch agk_patch(Point2 mu, double sigma1, double sigma2, double theta,
                      const KernelConfig& config, double window_len = 0.0);
KernelPatch agk_patch(Point2 mu, double sigma1, double sigma2, double theta, int half_width);

}  // namespace agkmap
