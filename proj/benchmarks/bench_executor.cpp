#include <benchmark/benchmark.h>

#include "common.hpp"
#include "safeplan/executor.hpp"
#include "safeplan/metrics.hpp"
#include "safeplan/noise.hpp"
#include "safeplan/relaxed_executor.hpp"

using namespace safeplan;

static void BM_ParseBundle(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bench_fixture("motor_overheat"));
}
BENCHMARK(BM_ParseBundle);

static void BM_RunPlan(benchmark::State& state) {
  auto bundle = bench_fixture("knife_child");
  auto plan = parse_plan(*bundle.ref_safe_plan, *bundle.augmented.domain);
  for (auto _ : state) benchmark::DoNotOptimize(run_plan(plan, bundle));
}
BENCHMARK(BM_RunPlan);

static void BM_RelaxedRun(benchmark::State& state) {
  auto bundle = bench_fixture("motor_overheat");
  auto plan = parse_plan(*bundle.ref_feasible_plan, *bundle.augmented.domain);
  for (auto _ : state) benchmark::DoNotOptimize(relaxed_run(plan, bundle));
}
BENCHMARK(BM_RelaxedRun);

// Full per-plan evaluation (parse, execute, relaxed run) as the batch runner does it.
static void BM_EvaluatePlan(benchmark::State& state) {
  auto bundle = bench_fixture("knife_child");
  if (state.range(0) > 0) bundle = inject(bundle, NoiseLevel{static_cast<std::size_t>(state.range(0)), 1, false});
  RawPlanText raw{"Step 1: MOVE_TO(table)\nStep 2: OPEN(drawer)\nStep 3: PLACE_IN(knife, drawer)\nStep 4: CLOSE(drawer)\n",
                  "m", bundle.id, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_plan(raw, bundle));
}
BENCHMARK(BM_EvaluatePlan)->Arg(0)->Arg(64);
