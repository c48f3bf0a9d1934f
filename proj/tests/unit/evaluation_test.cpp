#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "agkmap/evaluation.hpp"
#include "oracles.hpp"

namespace agkmap {
namespace {

TEST(Mae, Examples) {
  EXPECT_EQ(mae(std::vector<CountPair>{{5, 5}, {7, 7}}), 0.0);
  EXPECT_DOUBLE_EQ(mae(std::vector<CountPair>{{2, 3}, {5, 5}}), 0.5);
  EXPECT_DOUBLE_EQ(mae(std::vector<CountPair>{{10, 7}}), 3.0);
}

TEST(Rmse, Examples) {
  EXPECT_EQ(rmse(std::vector<CountPair>{{5, 5}}), 0.0);
  EXPECT_NEAR(rmse(std::vector<CountPair>{{2, 3}, {5, 5}}), std::sqrt(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(rmse(std::vector<CountPair>{{0, 3}, {0, -3}}), 3.0);
}

TEST(Metrics, EmptyThrows) {
  try {
    mae({});
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "no records");
  }
  EXPECT_THROW(rmse({}), std::invalid_argument);
}

TEST(Metrics, RmseDominatesMaeAndIgnoresOrder) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 60);
  std::uniform_int_distribution<int> n(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CountPair> pairs(static_cast<std::size_t>(n(rng)));
    for (auto& p : pairs) p = {u(rng), u(rng)};
    const double m = mae(pairs), r = rmse(pairs);
    EXPECT_GE(r, m - 1e-12);
    EXPECT_GE(m, 0.0);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    EXPECT_NEAR(mae(pairs), m, 1e-12);
    EXPECT_NEAR(rmse(pairs), r, 1e-12);
  }
}

TEST(PixelMse, Examples) {
  DensityMap zeros(4, 3);
  EXPECT_EQ(pixel_mse(zeros, zeros).raw, 0.0);

  DensityMap one = zeros;
  one.at(2, 1) = 0.5;
  EXPECT_DOUBLE_EQ(pixel_mse(zeros, one).raw, 0.25);
  EXPECT_DOUBLE_EQ(pixel_mse(zeros, one).per_pixel, 0.25 / 12);

  DensityMap base(5, 5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (double& v : base.values()) v = u(rng);
  DensityMap plus = base;
  for (double& v : plus.values()) v += 0.1;
  EXPECT_NEAR(pixel_mse(base, plus).raw, 25 * 0.01, 1e-12);
}

TEST(PixelMse, DimensionMismatchThrows) {
  EXPECT_THROW(pixel_mse(DensityMap(4, 3), DensityMap(3, 4)), std::invalid_argument);
}

TEST(DensityLevel, Boundaries) {
  EXPECT_EQ(density_level(0), DensityLevel::low);
  EXPECT_EQ(density_level(4), DensityLevel::low);
  EXPECT_EQ(density_level(4.999), DensityLevel::low);
  EXPECT_EQ(density_level(5), DensityLevel::medium);
  EXPECT_EQ(density_level(19), DensityLevel::medium);
  EXPECT_EQ(density_level(19.5), DensityLevel::medium);
  EXPECT_EQ(density_level(20), DensityLevel::high);
  EXPECT_EQ(density_level(300), DensityLevel::high);
  EXPECT_THROW(density_level(-1), std::invalid_argument);
  EXPECT_THROW(density_level(std::nan("")), std::invalid_argument);
}

TEST(DensityLevel, Monotone) {
  int prev = 0;
  for (double c = 0; c < 40; c += 0.25) {
    const int level = static_cast<int>(density_level(c));
    EXPECT_GE(level, prev);
    prev = level;
  }
}

DensityMap map_with_count(double count, int w = 8, int h = 8) {
  DensityMap m(w, h);
  m.at(3, 3) = count;
  return m;
}

TEST(EvaluateDataset, PerfectPredictions) {
  MapSet gt{{"a", map_with_count(2)}, {"b", map_with_count(12)}, {"c", map_with_count(30)}};
  const auto report = evaluate_dataset(gt, gt);
  for (const auto* s : {&report.overall, &report.low, &report.medium, &report.high}) {
    ASSERT_TRUE(s->metrics.has_value());
    EXPECT_EQ(s->metrics->mae, 0.0);
    EXPECT_EQ(s->metrics->rmse, 0.0);
    EXPECT_EQ(s->metrics->mean_pixel_mse, 0.0);
  }
  EXPECT_EQ(report.overall.n_images, 3u);
}

TEST(EvaluateDataset, StratifiedAggregation) {
  MapSet gt{{"l1", map_with_count(2)}, {"l2", map_with_count(3)}, {"h1", map_with_count(25)}};
  MapSet pred{{"l1", map_with_count(3)}, {"l2", map_with_count(2)}, {"h1", map_with_count(22)}};
  const auto r = evaluate_dataset(gt, pred);
  EXPECT_NEAR(r.overall.metrics->mae, 5.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.overall.metrics->rmse, std::sqrt(11.0 / 3.0), 1e-12);
  EXPECT_EQ(r.low.n_images, 2u);
  EXPECT_NEAR(r.low.metrics->mae, 1.0, 1e-12);
  EXPECT_EQ(r.high.n_images, 1u);
  EXPECT_NEAR(r.high.metrics->mae, 3.0, 1e-12);
  EXPECT_EQ(r.medium.n_images, 0u);
  EXPECT_FALSE(r.medium.metrics.has_value());
  EXPECT_EQ(r.low.n_images + r.medium.n_images + r.high.n_images, r.overall.n_images);
  EXPECT_NEAR(r.overall.metrics->mean_pixel_mse, (1.0 + 1.0 + 9.0) / 3.0, 1e-12);
}

TEST(EvaluateDataset, UnmatchedIdsAreListed) {
  MapSet gt{{"a", map_with_count(1)}, {"b", map_with_count(1)}};
  MapSet pred{{"a", map_with_count(1)}, {"z", map_with_count(1)}};
  try {
    evaluate_dataset(gt, pred);
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("z"), std::string::npos);
    EXPECT_NE(msg.find("b"), std::string::npos);
  }
}

TEST(EvaluateDataset, RandomAgainstBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 40);
  MapSet gt, pred;
  std::vector<testing::PairRecord> records;
  for (int i = 0; i < 30; ++i) {
    const double g = u(rng), p = u(rng);
    gt.emplace("img" + std::to_string(i), map_with_count(g));
    pred.emplace("img" + std::to_string(i), map_with_count(p));
    records.push_back({g, p});
  }
  const auto r = evaluate_dataset(gt, pred);
  EXPECT_NEAR(r.overall.metrics->mae, testing::brute_mae(records), 1e-9);
  EXPECT_NEAR(r.overall.metrics->rmse, testing::brute_rmse(records), 1e-9);
  EXPECT_GE(r.overall.metrics->rmse, r.overall.metrics->mae);
}

}  // namespace
}  // namespace agkmap
