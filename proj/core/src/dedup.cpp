#include "agkmap/dedup.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "agkmap/summation.hpp"

namespace agkmap {

double feature_distance(const FeatureStack& fa, const FeatureStack& fb) {
  double total = 0.0;
  for (std::size_t j = 0; j < kFeatureLayers; ++j) {
    const auto& la = fa.layers[j];
    const auto& lb = fb.layers[j];
    if (!la.same_shape(lb)) {
      throw std::invalid_argument("feature layer " + std::to_string(j) + " shape mismatch: (" +
                                  std::to_string(la.channels) + "," + std::to_string(la.height) + "," +
                                  std::to_string(la.width) + ") vs (" + std::to_string(lb.channels) + "," +
                                  std::to_string(lb.height) + "," + std::to_string(lb.width) + ")");
    }
    const std::size_t n = la.element_count();
    if (n == 0) throw std::invalid_argument("feature layer " + std::to_string(j) + " is empty");
    if (la.values.size() != n || lb.values.size() != n) {
      throw std::invalid_argument("feature layer " + std::to_string(j) + " value count does not match its shape");
    }
    CompensatedSum sq;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(la.values[i]) - static_cast<double>(lb.values[i]);
      sq += d * d;
    }
    total += sq.value() / static_cast<double>(n);
  }
  return total;
}

IndexDedupResult greedy_dedup(std::size_t n, const std::function<double(std::size_t, std::size_t)>& distance,
                              double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("dedup threshold must be positive");
  IndexDedupResult result;
  for (std::size_t i = 0; i < n; ++i) {
    bool dropped = false;
    for (std::size_t k : result.kept) {
      const double d = distance(i, k);
      if (d < threshold) {
        result.dropped.push_back({i, k, d});
        dropped = true;
        break;
      }
    }
    if (!dropped) result.kept.push_back(i);
  }
  return result;
}

DedupResult deduplicate(const std::vector<FeatureStack>& stacks, double threshold) {
  const auto indexed = greedy_dedup(
      stacks.size(), [&](std::size_t i, std::size_t k) { return feature_distance(stacks[i], stacks[k]); }, threshold);
  DedupResult result;
  for (std::size_t k : indexed.kept) result.kept.push_back(stacks[k].image_id);
  for (const auto& d : indexed.dropped) {
    result.dropped.push_back({stacks[d.dropped].image_id, stacks[d.kept].image_id, d.distance});
  }
  return result;
}

namespace {

struct Plane {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
};

// Separable [1 4 6 4 1] / 16 with clamped borders.
Plane binomial_blur(const Plane& in) {
  constexpr double taps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const auto w = static_cast<std::ptrdiff_t>(in.width);
  const auto h = static_cast<std::ptrdiff_t>(in.height);
  auto at = [](const std::vector<double>& v, std::ptrdiff_t stride, std::ptrdiff_t x, std::ptrdiff_t y) {
    return v[static_cast<std::size_t>(y * stride + x)];
  };

  std::vector<double> horizontal(in.values.size());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) acc += taps[t + 2] * at(in.values, w, std::clamp<std::ptrdiff_t>(x + t, 0, w - 1), y);
      horizontal[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  Plane out{in.width, in.height, std::vector<double>(in.values.size())};
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) acc += taps[t + 2] * at(horizontal, w, x, std::clamp<std::ptrdiff_t>(y + t, 0, h - 1));
      out.values[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  return out;
}

Plane decimate(const Plane& in) {
  Plane out{in.width / 2, in.height / 2, {}};
  out.values.reserve(out.width * out.height);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) out.values.push_back(in.values[(2 * y) * in.width + 2 * x]);
  }
  return out;
}

FeatureTensor as_tensor(const Plane& plane) {
  FeatureTensor t;
  t.channels = 1;
  t.height = plane.height;
  t.width = plane.width;
  t.values.assign(plane.values.begin(), plane.values.end());
  return t;
}

}  // namespace

FeatureStack builtin_feature_pyramid(const Image& image, std::string image_id) {
  if (image.width < 32 || image.height < 32) {
    throw std::invalid_argument("feature pyramid needs at least 32x32 pixels, got " + std::to_string(image.width) +
                                "x" + std::to_string(image.height));
  }
  FeatureStack stack;
  stack.image_id = std::move(image_id);
  Plane level{static_cast<std::size_t>(image.width), static_cast<std::size_t>(image.height), to_grey(image)};
  stack.layers[0] = as_tensor(level);
  for (std::size_t j = 1; j < kFeatureLayers; ++j) {
    level = decimate(binomial_blur(level));
    stack.layers[j] = as_tensor(level);
  }
  return stack;
}

}  // namespace agkmap
