#include <random>

#include "doctest.h"
#include "gen_bundle.hpp"
#include "safeplan/error.hpp"
#include "safeplan/metrics.hpp"
#include "safeplan/noise.hpp"
#include "safeplan/pddl.hpp"
#include "safeplan/relaxed_executor.hpp"

using namespace safeplan;
using namespace testing_support;

TEST_SUITE("properties") {

TEST_CASE("executor agrees with the naive interpreter on random tasks") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 300; ++i) {
    auto task = gen::random_task(rng);
    auto bundle = to_bundle(task);
    for (int k = 0; k < 4; ++k) {
      auto steps = k % 2 ? gen::random_plan(task, rng, 5) : gen::feasible_walk(task, rng, 5);
      if (k % 2 == 0) bundle = to_bundle(task);
      auto diff = compare_with_naive(task, steps, bundle);
      INFO(task.describe() << plan_text(task, steps));
      CHECK(diff == "");
    }
  }
}

TEST_CASE("verdict algebra holds for random plans") {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 300; ++i) {
    auto task = gen::random_task(rng);
    auto bundle = to_bundle(task);
    auto steps = gen::random_plan(task, rng, 6);
    auto text = plan_text(task, steps);
    if (i % 5 == 0) text += "FLY_AWAY(o0)\n";
    auto rec = evaluate_plan(RawPlanText{text, "m", "gen", std::nullopt}, bundle);
    CHECK(rec.consistent());
    CHECK((!rec.safe || rec.feasible));
    auto plan = parse_plan(text, *bundle.basic.domain);
    CHECK(run_basic(plan, bundle.basic).feasible == rec.feasible);
  }
}

TEST_CASE("safety intention equals safety on feasible plans") {
  std::mt19937_64 rng(303);
  for (int i = 0; i < 300; ++i) {
    auto task = gen::random_task(rng);
    auto steps = gen::feasible_walk(task, rng, 6);
    auto bundle = to_bundle(task);
    auto plan = to_plan(task, steps, bundle);
    auto run = run_plan(plan, bundle);
    REQUIRE(run.feasible);
    auto relaxed = relaxed_run(plan, bundle);
    INFO(task.describe() << plan_text(task, steps));
    CHECK(relaxed.si == run.safe);
    CHECK(relaxed.trace.terminal_danger == *run.trace.states.back().danger);
  }
}

TEST_CASE("undefined steps leave relaxed danger unchanged") {
  std::mt19937_64 rng(404);
  for (int i = 0; i < 200; ++i) {
    auto task = gen::random_task(rng);
    auto bundle = to_bundle(task);
    auto steps = gen::random_plan(task, rng, 5);
    auto base = plan_text(task, steps);
    auto with_junk = std::string("DANCE_WILDLY(o0)\n") + base + "ACT0(o0, o0, o0, o0)\n";
    auto a = relaxed_run(parse_plan(base, *bundle.basic.domain), bundle);
    auto b = relaxed_run(parse_plan(with_junk, *bundle.basic.domain), bundle);
    CHECK(a.trace.terminal_danger == b.trace.terminal_danger);
    CHECK(a.si == b.si);
  }
}

TEST_CASE("rendered domains re-parse to the same domain") {
  std::mt19937_64 rng(505);
  for (int i = 0; i < 200; ++i) {
    auto task = gen::random_task(rng);
    auto bundle = to_bundle(task);
    auto text = render_domain_pddl(*parse_domain_pddl(task.domain_pddl()));
    auto again = parse_domain_pddl(text);
    CHECK(*again == *parse_domain_pddl(task.domain_pddl()));
    auto problem_text = render_problem_pddl(bundle.basic);
    auto problem = parse_problem_pddl(problem_text, *again);
    CHECK(problem.init == bundle.basic.init);
    CHECK(problem.goal == bundle.basic.goal);
  }
}

TEST_CASE("noise injection preserves verdicts of random plans") {
  std::mt19937_64 rng(606);
  for (int i = 0; i < 150; ++i) {
    auto task = gen::random_task(rng);
    auto bundle = to_bundle(task);
    auto noisy = inject(bundle, NoiseLevel{4, static_cast<std::uint64_t>(i), false});
    for (int k = 0; k < 3; ++k) {
      auto text = plan_text(task, gen::random_plan(task, rng, 5));
      auto a = evaluate_plan(RawPlanText{text, "m", "gen", std::nullopt}, bundle);
      auto b = evaluate_plan(RawPlanText{text, "m", "gen", std::nullopt}, noisy);
      CHECK(a.verdict == b.verdict);
      CHECK(a.si == b.si);
      CHECK(a.relaxed_danger == b.relaxed_danger);
    }
  }
}

TEST_CASE("rates stay exact under multiplication") {
  std::mt19937_64 rng(707);
  for (int i = 0; i < 1000; ++i) {
    std::int64_t d1 = std::uniform_int_distribution<std::int64_t>(1, 500)(rng);
    std::int64_t d2 = std::uniform_int_distribution<std::int64_t>(1, 500)(rng);
    std::int64_t n1 = std::uniform_int_distribution<std::int64_t>(0, d1)(rng);
    std::int64_t n2 = std::uniform_int_distribution<std::int64_t>(0, d2)(rng);
    auto p = Rate::of(n1, d1) * Rate::of(n2, d2);
    CHECK(p.num * d1 * d2 == n1 * n2 * p.den);
    CHECK(p.value() <= 1.0);
  }
}

}
