#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agkmap/density_map.hpp"

namespace agkmap {

struct CountPair {
  double gt = 0.0;
  double pred = 0.0;
};

// Ground-truth count strata: low < 5 <= medium < 20 <= high.
enum class DensityLevel { low, medium, high };

const char* to_string(DensityLevel level) noexcept;

// Both throw std::invalid_argument("no records") on an empty list.
double mae(std::span<const CountPair> pairs);
double rmse(std::span<const CountPair> pairs);

struct PixelError {
  double raw = 0.0;        // sum of squared differences
  double per_pixel = 0.0;  // raw / (width * height)
};

// Throws std::invalid_argument on a dimension mismatch.
PixelError pixel_mse(const DensityMap& gt, const DensityMap& pred);

// Throws std::invalid_argument for negative (or NaN) counts.
DensityLevel density_level(double count);

struct EvalRecord {
  std::string image_id;
  double gt_count = 0.0;
  double pred_count = 0.0;
  DensityLevel level = DensityLevel::low;
  double pixel_mse = 0.0;  // raw squared distance between the two maps
};

struct StratumMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  double mean_pixel_mse = 0.0;
};

// A stratum without images carries n_images = 0 and no metrics.
struct StratumReport {
  std::size_t n_images = 0;
  std::optional<StratumMetrics> metrics;
};

struct EvalReport {
  StratumReport overall;
  StratumReport low;
  StratumReport medium;
  StratumReport high;
  std::vector<EvalRecord> records;  // sorted by image id

  [[nodiscard]] const StratumReport& stratum(DensityLevel level) const noexcept;
};

using MapSet = std::map<std::string, DensityMap>;

/// Scores predicted maps against ground truth, matched by image id.
/// Throws std::invalid_argument listing every id that lacks a counterpart.
EvalReport evaluate_dataset(const MapSet& gt_maps, const MapSet& pred_maps);

/// Builds the report from already-computed records.
EvalReport summarize(std::vector<EvalRecord> records);

}  // namespace agkmap
