#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "agkmap/density_map.hpp"
#include "agkmap/evaluation.hpp"

namespace {

agkmap::AnnotationSet make_scene(int labels) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(0, 639), y(0, 359), len(5, 60), ang(0, 3.14159);
  agkmap::AnnotationSet ann{"bench", 640, 360, {}};
  for (int i = 0; i < labels; ++i) {
    const double cx = x(rng), cy = y(rng), l = len(rng), t = ang(rng);
    const agkmap::Point2 a{cx, cy};
    agkmap::Point2 b{cx + l * std::cos(t), cy + l * std::sin(t)};
    b.x = std::clamp(b.x, 0.0, 639.0);
    b.y = std::clamp(b.y, 0.0, 359.0);
    ann.labels.push_back({a, b});
  }
  return ann;
}

void BM_DensityMap(benchmark::State& state, agkmap::Scheme scheme) {
  const auto ann = make_scene(static_cast<int>(state.range(0)));
  const agkmap::KernelConfig cfg;
  for (auto _ : state) {
    auto map = agkmap::density_map(ann, scheme, cfg);
    benchmark::DoNotOptimize(map.values().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PixelMse(benchmark::State& state) {
  const auto ann = make_scene(30);
  const auto a = agkmap::density_map(ann, agkmap::Scheme::agk, {});
  const auto b = agkmap::density_map(ann, agkmap::Scheme::line, {});
  for (auto _ : state) benchmark::DoNotOptimize(agkmap::pixel_mse(a, b));
}

}  // namespace

BENCHMARK_CAPTURE(BM_DensityMap, dot, agkmap::Scheme::dot)->Arg(10)->Arg(50);
BENCHMARK_CAPTURE(BM_DensityMap, line, agkmap::Scheme::line)->Arg(10)->Arg(50);
BENCHMARK_CAPTURE(BM_DensityMap, agk, agkmap::Scheme::agk)->Arg(10)->Arg(50);
BENCHMARK(BM_PixelMse);
BENCHMARK_MAIN();
