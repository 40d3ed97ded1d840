#include <benchmark/benchmark.h>

#include "common.hpp"
#include "safeplan/noise.hpp"
#include "safeplan/planner.hpp"

using namespace safeplan;

static void BM_ReferencePair(benchmark::State& state, const char* name) {
  auto bundle = bench_fixture(name);
  for (auto _ : state) benchmark::DoNotOptimize(reference_pair(bundle));
}
BENCHMARK_CAPTURE(BM_ReferencePair, knife_child, "knife_child");
BENCHMARK_CAPTURE(BM_ReferencePair, motor_overheat, "motor_overheat");
BENCHMARK_CAPTURE(BM_ReferencePair, battery_route, "battery_route");

// Distractors are pruned from the search but still grounded; this tracks that overhead.
static void BM_SolveWithNoise(benchmark::State& state) {
  auto bundle = inject(bench_fixture("stove_left_on"), NoiseLevel{static_cast<std::size_t>(state.range(0)), 1, false});
  for (auto _ : state) benchmark::DoNotOptimize(solve(bundle, SolveMode::Augmented));
}
BENCHMARK(BM_SolveWithNoise)->RangeMultiplier(4)->Range(2, 64);
