#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "agkmap/image.hpp"

namespace agkmap {

// (channels, height, width) tensor, channel-major then row-major.
struct FeatureTensor {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;

  [[nodiscard]] std::size_t element_count() const noexcept { return channels * height * width; }
  [[nodiscard]] bool same_shape(const FeatureTensor& other) const noexcept {
    return channels == other.channels && height == other.height && width == other.width;
  }
};

inline constexpr std::size_t kFeatureLayers = 5;

struct FeatureStack {
  std::string image_id;
  std::array<FeatureTensor, kFeatureLayers> layers;
};

/// Sum over the five layers of ||fa_j - fb_j||^2 / (C_j H_j W_j).
/// Throws std::invalid_argument naming the first layer whose shape differs
/// or is empty.
double feature_distance(const FeatureStack& fa, const FeatureStack& fb);

struct DroppedImage {
  std::string dropped_id;
  std::string kept_id;
  double distance = 0.0;
};

struct DedupResult {
  std::vector<std::string> kept;
  std::vector<DroppedImage> dropped;
};

inline constexpr double kDefaultDedupThreshold = 2.0;

struct IndexDrop {
  std::size_t dropped = 0;
  std::size_t kept = 0;
  double distance = 0.0;
};

struct IndexDedupResult {
  std::vector<std::size_t> kept;
  std::vector<IndexDrop> dropped;
};

/// Greedy keep-first scan over items 0..n-1: item i is dropped when its
/// distance to some already-kept item is strictly below the threshold. The
/// drop is attributed to the earliest such kept item.
IndexDedupResult greedy_dedup(std::size_t n, const std::function<double(std::size_t, std::size_t)>& distance,
                              double threshold);

/// Deduplicates stacks in input order. Throws std::invalid_argument for a
/// non-positive threshold.
DedupResult deduplicate(const std::vector<FeatureStack>& stacks, double threshold = kDefaultDedupThreshold);

/// Stand-in extractor: grey levels (0..255), then four rounds of a 5-tap
/// binomial blur and 2x decimation, giving layers of (1, H >> j, W >> j).
/// Not a deep feature extractor. Throws std::invalid_argument for images
/// smaller than 32x32.
FeatureStack builtin_feature_pyramid(const Image& image, std::string image_id = {});

}  // namespace agkmap
