#include "agkmap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agkmap/summation.hpp"

namespace agkmap {

const char* to_string(DensityLevel level) noexcept {
  switch (level) {
    case DensityLevel::low: return "low";
    case DensityLevel::medium: return "medium";
    case DensityLevel::high: return "high";
  }
  return "?";
}

double mae(std::span<const CountPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("no records");
  CompensatedSum total;
  for (const auto& p : pairs) total += std::abs(p.gt - p.pred);
  return total.value() / static_cast<double>(pairs.size());
}

double rmse(std::span<const CountPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("no records");
  CompensatedSum total;
  for (const auto& p : pairs) {
    const double d = p.gt - p.pred;
    total += d * d;
  }
  return std::sqrt(total.value() / static_cast<double>(pairs.size()));
}

PixelError pixel_mse(const DensityMap& gt, const DensityMap& pred) {
  if (gt.width() != pred.width() || gt.height() != pred.height()) {
    throw std::invalid_argument("pixel_mse: dimension mismatch (" + std::to_string(gt.width()) + "x" +
                                std::to_string(gt.height()) + " vs " + std::to_string(pred.width()) + "x" +
                                std::to_string(pred.height()) + ")");
  }
  const auto a = gt.values();
  const auto b = pred.values();
  CompensatedSum total;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  const double raw = total.value();
  return {raw, raw / static_cast<double>(a.size())};
}

DensityLevel density_level(double count) {
  if (!(count >= 0.0)) throw std::invalid_argument("density_level: count must be non-negative");
  if (count < 5.0) return DensityLevel::low;
  if (count < 20.0) return DensityLevel::medium;
  return DensityLevel::high;
}

const StratumReport& EvalReport::stratum(DensityLevel level) const noexcept {
  switch (level) {
    case DensityLevel::low: return low;
    case DensityLevel::medium: return medium;
    case DensityLevel::high: return high;
  }
  return overall;
}

namespace {

StratumReport score(const std::vector<const EvalRecord*>& records) {
  StratumReport report;
  report.n_images = records.size();
  if (records.empty()) return report;

  std::vector<CountPair> pairs;
  pairs.reserve(records.size());
  CompensatedSum pixel;
  for (const auto* r : records) {
    pairs.push_back({r->gt_count, r->pred_count});
    pixel += r->pixel_mse;
  }
  report.metrics = StratumMetrics{mae(pairs), rmse(pairs), pixel.value() / static_cast<double>(records.size())};
  return report;
}

}  // namespace

EvalReport summarize(std::vector<EvalRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& l, const EvalRecord& r) { return l.image_id < r.image_id; });

  std::vector<const EvalRecord*> all, low, medium, high;
  for (const auto& r : records) {
    all.push_back(&r);
    switch (r.level) {
      case DensityLevel::low: low.push_back(&r); break;
      case DensityLevel::medium: medium.push_back(&r); break;
      case DensityLevel::high: high.push_back(&r); break;
    }
  }

  EvalReport report;
  report.overall = score(all);
  report.low = score(low);
  report.medium = score(medium);
  report.high = score(high);
  report.records = std::move(records);
  return report;
}

EvalReport evaluate_dataset(const MapSet& gt_maps, const MapSet& pred_maps) {
  std::vector<std::string> missing_gt, missing_pred;
  for (const auto& [id, _] : pred_maps) {
    if (!gt_maps.contains(id)) missing_gt.push_back(id);
  }
  for (const auto& [id, _] : gt_maps) {
    if (!pred_maps.contains(id)) missing_pred.push_back(id);
  }
  if (!missing_gt.empty() || !missing_pred.empty()) {
    std::string msg = "unmatched image ids;";
    auto list = [&msg](const char* what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += std::string(" ") + what + ":";
      for (const auto& id : ids) msg += " " + id;
      msg += ";";
    };
    list("no ground truth for", missing_gt);
    list("no prediction for", missing_pred);
    msg.pop_back();
    throw std::invalid_argument(msg);
  }

  std::vector<EvalRecord> records;
  records.reserve(gt_maps.size());
  for (const auto& [id, gt] : gt_maps) {
    const auto& pred = pred_maps.at(id);
    EvalRecord r;
    r.image_id = id;
    r.gt_count = count_from_density(gt);
    r.pred_count = count_from_density(pred);
    // ground-truth sums can land a hair below zero only through float noise
    r.level = density_level(std::max(r.gt_count, 0.0));
    r.pixel_mse = pixel_mse(gt, pred).raw;
    records.push_back(std::move(r));
  }
  return summarize(std::move(records));
}

}  // namespace agkmap
