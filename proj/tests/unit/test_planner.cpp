#include <algorithm>

#include "check_error.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "safeplan/executor.hpp"
#include "safeplan/planner.hpp"

using namespace safeplan;
using testing_support::load_fixture;

TEST_SUITE("planner") {

TEST_CASE("knife: shortest plans per mode") {
  auto bundle = load_fixture("knife_child");
  const auto& d = *bundle.basic.domain;
  SearchStats stats;
  auto basic = solve(bundle, SolveMode::Basic, {}, &stats);
  CHECK(basic.size() == 2);
  CHECK(stats.expanded > 0);
  CHECK(stats.relevant_actions <= stats.ground_actions);

  auto safe = solve(bundle, SolveMode::Augmented);
  CHECK(format_plan(d, safe) == *bundle.ref_safe_plan);
  CHECK(run_plan(safe, bundle).safe);

  auto unsafe = solve(bundle, SolveMode::Unsafe);
  CHECK(format_plan(d, unsafe) == *bundle.ref_feasible_plan);
  CHECK(kind_of(run_plan(unsafe, bundle).verdict) == VerdictKind::FeasibleUnsafe);

  auto pair = reference_pair(bundle);
  CHECK(pair.safe_plan.size() == 4);
  CHECK(pair.feasible_plan.size() == 2);
  CHECK(pair.safety_effort == 2);
  CHECK(pair.feasible_plan_unsafe);
}

TEST_CASE("reference pairs match every fixture's stored references and metadata") {
  for (const auto& bundle : testing_support::load_all_fixtures()) {
    INFO(bundle.id);
    auto pair = reference_pair(bundle);
    const auto& d = *bundle.basic.domain;
    REQUIRE(bundle.ref_safe_plan.has_value());
    CHECK(format_plan(d, pair.safe_plan) == *bundle.ref_safe_plan);
    CHECK(format_plan(d, pair.feasible_plan) == bundle.ref_feasible_plan.value_or(""));
    CHECK(bundle.meta.safety_effort == pair.safety_effort);
    CHECK(run_plan(pair.safe_plan, bundle).safe);
    CHECK(run_plan(pair.feasible_plan, bundle).feasible);
  }
}

TEST_CASE("negative safety effort") {
  auto pair = reference_pair(load_fixture("reheat_soup"));
  CHECK(pair.safety_effort == -1);
  CHECK(pair.feasible_plan_unsafe);
}

TEST_CASE("goal already satisfied and no unsafe plan") {
  auto bundle = load_fixture("trivial_door");
  CHECK(solve(bundle, SolveMode::Basic).size() == 0);
  CHECK(solve(bundle, SolveMode::Augmented).size() == 0);
  CHECK_ERROR_CODE(solve(bundle, SolveMode::Unsafe), ErrorCode::Unsolvable);
  auto pair = reference_pair(bundle);
  CHECK_FALSE(pair.feasible_plan_unsafe);
  CHECK(pair.safety_effort == 0);
}

TEST_CASE("unsolvable and limited searches") {
  auto bundle = make_bundle("stuck",
                            "(define (domain c) (:predicates (p) (q)) (:action a :precondition (and (q)) :effect (p)))",
                            "(define (problem x) (:domain c) (:init) (:goal (and (p))))", R"j({"rules": []})j");
  CHECK_ERROR_CODE(solve(bundle, SolveMode::Basic), ErrorCode::Unsolvable);

  auto knife = load_fixture("knife_child");
  SearchLimits tight;
  tight.max_expanded_nodes = 1;
  CHECK_ERROR_CODE(solve(knife, SolveMode::Augmented, tight), ErrorCode::LimitExceeded);
  SearchLimits shallow;
  shallow.max_depth = 2;
  CHECK_ERROR_CODE(solve(knife, SolveMode::Augmented, shallow), ErrorCode::LimitExceeded);
}

TEST_CASE("grounding is sorted and type-correct") {
  auto bundle = load_fixture("knife_child");
  const auto& d = *bundle.basic.domain;
  auto all = ground_all(d);
  CHECK_FALSE(all.empty());
  std::vector<std::string> names;
  for (const auto& g : all) names.push_back(format_action(d, g));
  CHECK(std::is_sorted(names.begin(), names.end()));
  CHECK(std::find(names.begin(), names.end(), "PLACE_ON(knife, table)") != names.end());
  CHECK(std::find(names.begin(), names.end(), "PLACE_ON(table, knife)") == names.end());
}

TEST_CASE("mode names") {
  CHECK(parse_solve_mode("augmented") == SolveMode::Augmented);
  CHECK(to_string(SolveMode::Unsafe) == "unsafe");
  CHECK_ERROR_CODE(parse_solve_mode("fast"), ErrorCode::InvalidArgument);
}

}
