#include "agkmap/density_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "agkmap/summation.hpp"

namespace agkmap {

DensityMap::DensityMap(int width, int height) : DensityMap(width, height, {}) {}

DensityMap::DensityMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("density map dimensions must be positive");
  const auto cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (values_.empty()) values_.assign(cells, 0.0);
  if (values_.size() != cells) throw std::invalid_argument("density map value count does not match dimensions");
}

void DensityMap::add(const KernelPatch& patch, double weight) {
  const int x0 = std::max(patch.origin_x, 0);
  const int y0 = std::max(patch.origin_y, 0);
  const int x1 = std::min(patch.origin_x + patch.width, width_);
  const int y1 = std::min(patch.origin_y + patch.height, height_);
  for (int y = y0; y < y1; ++y) {
    const double* src = patch.values.data() + static_cast<std::size_t>(y - patch.origin_y) * patch.width;
    double* dst = values_.data() + index(0, y);
    for (int x = x0; x < x1; ++x) dst[x] += weight * src[x - patch.origin_x];
  }
}

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::dot: return "dot";
    case Scheme::line: return "line";
    case Scheme::agk: return "agk";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "dot") return Scheme::dot;
  if (name == "line") return Scheme::line;
  if (name == "agk") return Scheme::agk;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected dot, line or agk)");
}

namespace {

// Labels shorter than this are placed as dots by the AGK generator.
constexpr double kMinAgkLength = 1.0;

KernelPatch unit_mass_near(Point2 p, int width, int height) {
  KernelPatch patch;
  patch.origin_x = std::clamp(static_cast<int>(std::lround(p.x)), 0, width - 1);
  patch.origin_y = std::clamp(static_cast<int>(std::lround(p.y)), 0, height - 1);
  patch.width = 1;
  patch.height = 1;
  patch.values = {1.0};
  return patch;
}

// Clips to the canvas and renormalizes so a label contributes exactly one
// count.
KernelPatch fit_to_canvas(const KernelPatch& patch, Point2 anchor, int width, int height) {
  KernelPatch clipped = patch.clipped(width, height);
  if (clipped.values.empty() || !clipped.normalize()) return unit_mass_near(anchor, width, height);
  return clipped;
}

KernelPatch dot_patch(Point2 centre, const KernelConfig& config, int width, int height) {
  return fit_to_canvas(isotropic_patch(centre, config.sigma_basic, config), centre, width, height);
}

// Sum of the per-point kernels of one line label, restricted to the canvas
// and normalized to one.
KernelPatch line_patch(const LineLabel& label, const KernelConfig& config, int width, int height) {
  const auto points = sample_points(label);
  std::vector<KernelPatch> kernels;
  kernels.reserve(points.size());
  int x0 = width, y0 = height, x1 = 0, y1 = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    KernelPatch k = isotropic_patch(points[i], line_sigma(i, points.size(), config), config).clipped(width, height);
    if (k.values.empty()) continue;
    x0 = std::min(x0, k.origin_x);
    y0 = std::min(y0, k.origin_y);
    x1 = std::max(x1, k.origin_x + k.width);
    y1 = std::max(y1, k.origin_y + k.height);
    kernels.push_back(std::move(k));
  }
  const Point2 centre = midpoint(label);
  if (kernels.empty()) return unit_mass_near(centre, width, height);

  KernelPatch temp;
  temp.origin_x = x0;
  temp.origin_y = y0;
  temp.width = x1 - x0;
  temp.height = y1 - y0;
  temp.values.assign(static_cast<std::size_t>(temp.width) * temp.height, 0.0);
  for (const auto& k : kernels) {
    for (int row = 0; row < k.height; ++row) {
      double* dst = temp.values.data() + static_cast<std::size_t>(k.origin_y + row - y0) * temp.width +
                    (k.origin_x - x0);
      const double* src = k.values.data() + static_cast<std::size_t>(row) * k.width;
      for (int col = 0; col < k.width; ++col) dst[col] += src[col];
    }
  }
  if (!temp.normalize()) return unit_mass_near(centre, width, height);
  return temp;
}

KernelPatch agk_label_patch(const LineLabel& label, const KernelConfig& config, int width, int height) {
  const Point2 centre = midpoint(label);
  const double length = line_length(label);
  if (length < kMinAgkLength) return dot_patch(centre, config, width, height);

  const auto [sigma1, sigma2] = agk_sigmas(label, config);
  const double theta = slope_angle(label);
  return fit_to_canvas(agk_patch(centre, sigma1, sigma2, theta, config, std::ceil(length)), centre, width,
                       height);
}

template <typename PatchFn>
DensityMap accumulate(const AnnotationSet& ann, const KernelConfig& config, PatchFn&& make_patch) {
  config.validate();
  DensityMap map(ann.width, ann.height);
  for (const auto& label : ann.labels) map.add(make_patch(label, config, ann.width, ann.height));
  return map;
}

}  // namespace

DensityMap dot_density_map(const AnnotationSet& ann, const KernelConfig& config) {
  return accumulate(ann, config, [](const LineLabel& label, const KernelConfig& cfg, int w, int h) {
    return dot_patch(midpoint(label), cfg, w, h);
  });
}

DensityMap line_density_map(const AnnotationSet& ann, const KernelConfig& config) {
  return accumulate(ann, config, line_patch);
}

DensityMap agk_density_map(const AnnotationSet& ann, const KernelConfig& config) {
  return accumulate(ann, config, agk_label_patch);
}

DensityMap density_map(const AnnotationSet& ann, Scheme scheme, const KernelConfig& config) {
  switch (scheme) {
    case Scheme::dot: return dot_density_map(ann, config);
    case Scheme::line: return line_density_map(ann, config);
    case Scheme::agk: return agk_density_map(ann, config);
  }
  throw std::invalid_argument("unknown scheme");
}

double count_from_density(const DensityMap& map) noexcept { return compensated_sum(map.values()); }

}  // namespace agkmap
