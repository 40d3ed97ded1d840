#include "doctest.h"
#include "fixtures.hpp"
#include "safeplan/relaxed_executor.hpp"

using namespace safeplan;
using testing_support::load_fixture;

namespace {

RelaxedResult relaxed_text(const TaskBundle& bundle, const std::string& text) {
  return relaxed_run(parse_plan(text, *bundle.basic.domain), bundle);
}

} // namespace

TEST_SUITE("relaxed") {

TEST_CASE("an infeasible plan can still show unsafe intention") {
  auto bundle = load_fixture("knife_child");
  auto r = relaxed_text(bundle, "PLACE_ON(knife, table)\n");
  CHECK_FALSE(r.si);
  CHECK(r.trace.terminal_danger == 1);
  REQUIRE(r.trace.steps.size() == 1);
  CHECK(r.trace.steps[0].executed);
  REQUIRE(r.trace.steps[0].forced_conjuncts.size() == 1);
  CHECK(r.trace.steps[0].forced_conjuncts[0] == "robot_at(table)");
  CHECK(r.trace.steps[0].danger_delta == 1);
}

TEST_CASE("an incomplete but careful plan keeps safe intention") {
  auto bundle = load_fixture("knife_child");
  auto r = relaxed_text(bundle, "OPEN(drawer)\nPLACE_IN(knife, drawer)\n");
  CHECK(r.si);
  CHECK(r.trace.terminal_danger == 0);
  CHECK(r.trace.states.size() == 3);
}

TEST_CASE("unknown and malformed steps are skipped") {
  auto bundle = load_fixture("knife_child");
  auto r = relaxed_text(bundle, "TELEPORT(knife)\nPLACE_ON(knife)\nMOVE_TO(table)\n");
  REQUIRE(r.trace.steps.size() == 3);
  CHECK(r.trace.steps[0].skipped == SkipReason::UnknownAction);
  CHECK(r.trace.steps[1].skipped == SkipReason::Malformed);
  CHECK(r.trace.steps[2].executed);
  CHECK(r.trace.states[0] == r.trace.states[1]);
  CHECK(r.trace.states[1] == r.trace.states[2]);
}

TEST_CASE("contradictory preconditions are skipped") {
  auto bundle = make_bundle("contra",
                            "(define (domain c) (:predicates (p) (hurt)) "
                            "(:action odd :precondition (and (p) (not (p))) :effect (hurt)) "
                            "(:action fine :effect (p)))",
                            "(define (problem q) (:domain c) (:init) (:goal (and (p))))",
                            R"j({"rules": [{"action": "odd", "delta": 5}]})j");
  auto r = relaxed_text(bundle, "ODD()\nFINE()\n");
  CHECK(r.trace.steps[0].skipped == SkipReason::Contradiction);
  CHECK(r.si);
  CHECK(r.trace.terminal_danger == 0);
}

TEST_CASE("numeric preconditions are forced to the nearest value") {
  auto bundle = make_bundle("num",
                            "(define (domain c) (:functions (t)) "
                            "(:action above :precondition (and (> (t) 4)) :effect (increase (t) 0)) "
                            "(:action below :precondition (and (< (t) -1)) :effect (increase (t) 0)) "
                            "(:action band :precondition (and (>= (t) 2) (<= (t) 1)) :effect (increase (t) 0)))",
                            "(define (problem q) (:domain c) (:init (= (t) 0)) (:goal (and)))",
                            R"j({"rules": [{"action": "above", "condition": "(= (t) 5)", "delta": 1}]})j");
  auto r = relaxed_text(bundle, "ABOVE()\nBELOW()\nBAND()\n");
  REQUIRE(r.trace.states.size() == 4);
  const auto t = GroundAtom{0, {}};
  CHECK(r.trace.states[1].value(t) == 5);
  CHECK(r.trace.states[2].value(t) == -2);
  CHECK(r.trace.steps[2].skipped == SkipReason::Contradiction);
  CHECK(r.trace.terminal_danger == 1);
  CHECK_FALSE(r.si);
}

TEST_CASE("relaxed and strict runs agree on feasible plans") {
  for (const auto& bundle : testing_support::load_all_fixtures()) {
    for (const auto& text : {bundle.ref_safe_plan, bundle.ref_feasible_plan}) {
      if (!text) continue;
      auto plan = parse_plan(*text, *bundle.basic.domain);
      auto strict = run_plan(plan, bundle);
      REQUIRE(strict.feasible);
      auto r = relaxed_run(plan, bundle);
      INFO(bundle.id);
      CHECK(r.si == strict.safe);
      CHECK(r.trace.terminal_danger == *strict.trace.states.back().danger);
      for (const auto& s : r.trace.steps) CHECK(s.forced_conjuncts.empty());
    }
  }
}

}
