#include "check_error.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "safeplan/domain.hpp"
#include "safeplan/identifier.hpp"
#include "safeplan/pddl.hpp"

using namespace safeplan;
using testing_support::load_fixture;

TEST_SUITE("domain") {

TEST_CASE("identifiers are canonicalized") {
  CHECK(canonical_identifier("Move-To") == "move_to");
  CHECK(canonical_identifier("PLACE_ON") == "place_on");
  CHECK(display_action_name("move_to") == "MOVE_TO");
  CHECK(is_identifier("child_near"));
  CHECK_FALSE(is_identifier("two words"));
  CHECK_FALSE(is_identifier(""));
}

TEST_CASE("builders reject duplicates, cycles and the reserved fluent") {
  Domain d;
  auto thing = d.add_type("thing");
  auto tool = d.add_type("tool", thing);
  CHECK(d.is_subtype(tool, thing));
  CHECK(d.is_subtype(tool, 0));
  CHECK_FALSE(d.is_subtype(thing, tool));
  CHECK_ERROR_CODE(d.add_type("Thing"), ErrorCode::DuplicateSymbol);
  CHECK_ERROR_CODE(d.set_type_parent(thing, tool), ErrorCode::TypeCycle);
  CHECK_ERROR_CODE(d.add_fluent("danger", {}), ErrorCode::ReservedFluentDeclared);
  CHECK_ERROR_CODE(d.add_predicate("DANGER", {}), ErrorCode::ReservedFluentDeclared);
  d.add_object("hammer", tool);
  CHECK_ERROR_CODE(d.add_object("hammer", thing), ErrorCode::DuplicateSymbol);
  d.add_predicate("held", {Parameter{"t", tool}});
  CHECK_ERROR_CODE(d.add_predicate("held", {}), ErrorCode::DuplicateSymbol);
  CHECK(d.find_predicate("HELD").has_value());
  CHECK_FALSE(d.find_object("nail").has_value());
}

TEST_CASE("grounding checks schema, arity, objects and types") {
  auto bundle = load_fixture("knife_child");
  const auto& d = *bundle.basic.domain;
  auto g = ground(d, "PLACE_ON", {"knife", "table"});
  CHECK(format_action(d, g) == "PLACE_ON(knife, table)");
  CHECK_ERROR_CODE(ground(d, "FLY", {}), ErrorCode::UnknownSchema);
  CHECK_ERROR_CODE(ground(d, "PLACE_ON", {"knife"}), ErrorCode::ArityMismatch);
  CHECK_ERROR_CODE(ground(d, "PLACE_ON", {"knife", "spoon"}), ErrorCode::UnknownSymbol);
  CHECK_ERROR_CODE(ground(d, "PLACE_ON", {"table", "knife"}), ErrorCode::TypeMismatch);
  CHECK_ERROR_CODE(ground(d, SymbolId{99}, {}), ErrorCode::UnknownSchema);
}

TEST_CASE("state keeps atoms and fluents canonical") {
  State a, b;
  a.add({1, {2}});
  a.add({0, {}});
  b.add({0, {}});
  b.add({1, {2}});
  b.add({1, {2}});
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK(a.value({0, {}}) == 0);
  CHECK_FALSE(a.has_value({0, {}}));
  a.set_value({0, {}}, 5);
  CHECK(a.value({0, {}}) == 5);
  a.remove({1, {2}});
  CHECK_FALSE(a.holds({1, {2}}));
  CHECK(a.holds({0, {}}));
}

TEST_CASE("compilation injects one conditional danger effect per rule") {
  auto bundle = load_fixture("knife_child");
  const auto& basic = *bundle.basic.domain;
  const auto& aug = *bundle.augmented.domain;
  CHECK_FALSE(basic.has_danger_effects());
  CHECK(aug.has_danger_effects());
  auto id = *aug.find_action("place_on");
  CHECK(aug.actions()[id].effects.size() == basic.actions()[id].effects.size() + 1);
  CHECK(bundle.augmented.initial_state().danger == 0);
  CHECK_FALSE(bundle.basic.init.danger.has_value());
}

TEST_CASE("compilation errors") {
  auto bundle = load_fixture("knife_child");
  DangerRule rule{"place_on", {std::nullopt, std::nullopt}, {}, 1};

  auto unknown = rule;
  unknown.action = "juggle";
  CHECK_ERROR_CODE(compile_augmented(bundle.basic, {unknown}), ErrorCode::UnknownSchemaInRule);

  auto arity = rule;
  arity.binding.pop_back();
  CHECK_ERROR_CODE(compile_augmented(bundle.basic, {arity}), ErrorCode::BindingArityMismatch);

  auto zero = rule;
  zero.delta = 0;
  CHECK_ERROR_CODE(compile_augmented(bundle.basic, {zero}), ErrorCode::InvalidDelta);

  auto bad_binding = rule;
  bad_binding.binding[0] = "fork";
  CHECK_ERROR_CODE(compile_augmented(bundle.basic, {bad_binding}), ErrorCode::UnknownSymbol);

  auto wrong_type = rule;
  wrong_type.binding[0] = "table";
  CHECK_ERROR_CODE(compile_augmented(bundle.basic, {wrong_type}), ErrorCode::TypeMismatch);

  BasicProblem compiled = bundle.basic;
  compiled.domain = bundle.augmented.domain;
  CHECK_ERROR_CODE(compile_augmented(compiled, {rule}), ErrorCode::AlreadyCompiled);

  CHECK_ERROR_CODE(compile_augmented(bundle.basic, {rule}, kMaxInitialDanger + 1), ErrorCode::InvalidArgument);

  auto ok = compile_augmented(bundle.basic, {rule}, -3, 2);
  CHECK(ok.initial_state().danger == -3);
  CHECK(ok.d_max == 2);
}

TEST_CASE("comparators") {
  CHECK(compare(1, Comparator::Less, 2));
  CHECK(compare(2, Comparator::LessEq, 2));
  CHECK(compare(2, Comparator::Equal, 2));
  CHECK(compare(3, Comparator::GreaterEq, 2));
  CHECK_FALSE(compare(2, Comparator::Greater, 2));
}

}
