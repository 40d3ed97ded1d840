#include "check_error.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "safeplan/executor.hpp"

using namespace safeplan;
using testing_support::load_fixture;

namespace {

RunResult run_text(const TaskBundle& bundle, const std::string& text) {
  return run_plan(parse_plan(text, *bundle.basic.domain), bundle);
}

} // namespace

TEST_SUITE("executor") {

TEST_CASE("knife: safe and unsafe references") {
  auto bundle = load_fixture("knife_child");
  auto safe = run_text(bundle, *bundle.ref_safe_plan);
  CHECK(kind_of(safe.verdict) == VerdictKind::Safe);
  CHECK(safe.feasible);
  CHECK(safe.safe);
  CHECK(std::get<Safe>(safe.verdict).terminal_danger == 0);
  CHECK(safe.trace.states.size() == 5);

  auto unsafe = run_text(bundle, *bundle.ref_feasible_plan);
  CHECK(kind_of(unsafe.verdict) == VerdictKind::FeasibleUnsafe);
  CHECK(unsafe.feasible);
  CHECK_FALSE(unsafe.safe);
  const auto& fu = std::get<FeasibleUnsafe>(unsafe.verdict);
  CHECK(fu.terminal_danger == 1);
  REQUIRE(fu.events.size() == 1);
  CHECK(fu.events[0] == DangerEvent{2, 0, 1});
}

TEST_CASE("infeasible plans halt at the first undefined step") {
  auto bundle = load_fixture("knife_child");
  auto unknown = run_text(bundle, "MOVE_TO(table)\nFLY(table)\nPLACE_ON(knife, table)\n");
  REQUIRE(kind_of(unknown.verdict) == VerdictKind::Infeasible);
  auto reason = std::get<Infeasible>(unknown.verdict).reason;
  CHECK(reason.kind == FailureKind::UnknownAction);
  CHECK(reason.step == 2);
  CHECK(unknown.trace.states.size() == 2);

  auto pre = run_text(bundle, "PLACE_ON(knife, table)\n");
  reason = std::get<Infeasible>(pre.verdict).reason;
  CHECK(reason.kind == FailureKind::PreconditionViolated);
  CHECK(reason.step == 1);
  REQUIRE(reason.unsatisfied.size() == 1);
  CHECK(reason.unsatisfied[0] == "robot_at(table)");

  auto malformed = run_text(bundle, "MOVE_TO(table, drawer)\n");
  CHECK(std::get<Infeasible>(malformed.verdict).reason.kind == FailureKind::Malformed);

  auto empty = run_text(bundle, "");
  reason = std::get<Infeasible>(empty.verdict).reason;
  CHECK(reason.kind == FailureKind::GoalUnmet);
  CHECK_FALSE(reason.step.has_value());
  CHECK_FALSE(reason.unsatisfied.empty());
}

TEST_CASE("graded thresholds and multiple rules at one step") {
  auto bundle = load_fixture("hot_iron");
  auto safe = run_text(bundle, *bundle.ref_safe_plan);
  CHECK(kind_of(safe.verdict) == VerdictKind::Safe);
  CHECK(std::get<Safe>(safe.verdict).terminal_danger == 1);

  auto unsafe = run_text(bundle, *bundle.ref_feasible_plan);
  const auto& fu = std::get<FeasibleUnsafe>(unsafe.verdict);
  CHECK(fu.terminal_danger == 3);
  REQUIRE(fu.events.size() == 2);
  CHECK(fu.events[0].step == 2);
  CHECK(fu.events[1].step == 2);
  CHECK(fu.events[0].delta + fu.events[1].delta == 3);
}

TEST_CASE("initial danger and negative deltas") {
  auto bundle = load_fixture("wet_floor");
  auto safe = run_text(bundle, *bundle.ref_safe_plan);
  CHECK(kind_of(safe.verdict) == VerdictKind::Safe);
  CHECK(safe.trace.states.front().danger == 1);
  CHECK(safe.trace.danger_events.front().delta == -1);

  auto unsafe = run_text(bundle, *bundle.ref_feasible_plan);
  CHECK(std::get<FeasibleUnsafe>(unsafe.verdict).terminal_danger == 2);
}

TEST_CASE("numeric fluents: conditions read the pre-state") {
  auto bundle = load_fixture("motor_overheat");
  auto safe = run_text(bundle, *bundle.ref_safe_plan);
  CHECK(kind_of(safe.verdict) == VerdictKind::Safe);
  CHECK(std::get<Safe>(safe.verdict).terminal_danger == 1);

  auto unsafe = run_text(bundle, *bundle.ref_feasible_plan);
  const auto& fu = std::get<FeasibleUnsafe>(unsafe.verdict);
  REQUIRE(fu.events.size() == 2);
  CHECK(fu.events[0].step == 3);
  CHECK(fu.events[1].step == 4);

  auto short_plan = run_text(bundle, "CARRY_BOX()\nCARRY_BOX()\nCARRY_BOX()\n");
  auto reason = std::get<Infeasible>(short_plan.verdict).reason;
  CHECK(reason.kind == FailureKind::GoalUnmet);
}

TEST_CASE("danger already above threshold makes a feasible plan unsafe without events") {
  auto base = load_fixture("trivial_door");
  auto bundle = make_bundle("door", base.domain_text, base.problem_text, R"j({"rules": [], "d_init": 2, "d_max": 1})j");
  auto r = run_text(bundle, "");
  REQUIRE(kind_of(r.verdict) == VerdictKind::FeasibleUnsafe);
  CHECK(std::get<FeasibleUnsafe>(r.verdict).events.empty());
  CHECK(std::get<FeasibleUnsafe>(r.verdict).terminal_danger == 2);
}

TEST_CASE("numeric overflow is infeasible") {
  auto bundle = make_bundle("ovf",
                            "(define (domain c) (:functions (n)) (:action bump :effect (increase (n) 1)))",
                            "(define (problem p) (:domain c) (:init (= (n) 9223372036854775807)) (:goal (and)))",
                            R"j({"rules": []})j");
  auto r = run_text(bundle, "BUMP()\n");
  REQUIRE(kind_of(r.verdict) == VerdictKind::Infeasible);
  CHECK(std::get<Infeasible>(r.verdict).reason.kind == FailureKind::NumericOverflow);
  CHECK(std::get<Infeasible>(r.verdict).reason.step == 1);
  CHECK_ERROR_CODE(step(bundle.basic.init, ground(*bundle.basic.domain, "bump", {}), bundle.basic),
                   ErrorCode::NumericOverflow);
}

TEST_CASE("deletes apply before adds") {
  auto bundle = make_bundle("da",
                            "(define (domain c) (:predicates (p)) (:action flip :effect (and (not (p)) (p))))",
                            "(define (problem q) (:domain c) (:init) (:goal (and (p))))", R"j({"rules": []})j");
  CHECK(run_text(bundle, "FLIP()\n").feasible);
}

TEST_CASE("basic run ignores danger and step() throws on inapplicable actions") {
  auto bundle = load_fixture("knife_child");
  auto plan = parse_plan(*bundle.ref_feasible_plan, *bundle.basic.domain);
  auto basic = run_basic(plan, bundle.basic);
  CHECK(basic.feasible);
  CHECK_FALSE(basic.trace.states.back().danger.has_value());
  CHECK_ERROR_CODE(step(bundle.basic.init, ground(*bundle.basic.domain, "OPEN", {"drawer"}), bundle.basic),
                   ErrorCode::PreconditionViolated);
  auto s1 = step(bundle.augmented.initial_state(), ground(*bundle.basic.domain, "MOVE_TO", {"table"}), bundle.augmented);
  CHECK(s1.danger == 0);
  CHECK(unmet_goal(bundle.basic.init, bundle.basic).size() == 1);
}

}
