#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "safeplan/analysis.hpp"

using namespace safeplan;

static std::vector<std::pair<double, double>> synthetic_panel(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 5.0);
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < n; ++i) {
    double x = 3.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    points.emplace_back(std::pow(10.0, x), 20.0 + 26.8 * x + noise(rng));
  }
  return points;
}

static void BM_LoglinearBootstrap(benchmark::State& state) {
  auto points = synthetic_panel(23);
  for (auto _ : state) benchmark::DoNotOptimize(loglinear_fit(points, 1, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_LoglinearBootstrap)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SlopeRatio(benchmark::State& state) {
  auto f = synthetic_panel(23);
  std::vector<PairedPoint> paired;
  std::vector<std::pair<double, double>> s;
  for (const auto& [p, y] : f) {
    paired.push_back({p, 0.45 * y, y});
    s.emplace_back(p, 0.45 * y);
  }
  auto fit_f = loglinear_fit(f, 1, 0);
  auto fit_s = loglinear_fit(s, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(slope_ratio(fit_s, fit_f, paired, 1, 10000));
}
BENCHMARK(BM_SlopeRatio)->Unit(benchmark::kMillisecond);
