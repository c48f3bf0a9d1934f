#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "agkmap/annotations.hpp"
#include "agkmap/kernels.hpp"

namespace agkmap {

// Row-major width x height grid.
class DensityMap {
 public:
  DensityMap() = default;
  DensityMap(int width, int height);
  DensityMap(int width, int height, std::vector<double> values);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  double& at(int x, int y) { return values_[index(x, y)]; }
  [[nodiscard]] double at(int x, int y) const { return values_[index(x, y)]; }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  // Adds `weight * patch` at the patch origin; parts outside the grid are
  // ignored.
  void add(const KernelPatch& patch, double weight = 1.0);

  friend bool operator==(const DensityMap&, const DensityMap&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

enum class Scheme { dot, line, agk };

const char* to_string(Scheme scheme) noexcept;
// Throws std::invalid_argument for anything but "dot", "line", "agk".
Scheme parse_scheme(std::string_view name);

/// One isotropic kernel with sigma_basic at each label's midpoint.
DensityMap dot_density_map(const AnnotationSet& ann, const KernelConfig& config);

/// Isotropic kernels along each line with the position-dependent sigma
/// schedule; each label's temporary map is normalized to one count.
DensityMap line_density_map(const AnnotationSet& ann, const KernelConfig& config);

/// One anisotropic kernel per label, centred on the midpoint and aligned
/// with the line. Labels shorter than one pixel fall back to a dot kernel.
DensityMap agk_density_map(const AnnotationSet& ann, const KernelConfig& config);

DensityMap density_map(const AnnotationSet& ann, Scheme scheme, const KernelConfig& config);

/// Compensated sum of all cells. Not rounded.
double count_from_density(const DensityMap& map) noexcept;

}  // namespace agkmap
