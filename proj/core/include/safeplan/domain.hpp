#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace safeplan {

/// Index into one of the Domain symbol tables.
using SymbolId = std::uint32_t;

/// The name reserved for the danger counter. Bundle authors may not declare it.
inline constexpr std::string_view kDangerFluent = "danger";
inline constexpr std::string_view kRootType = "object";

struct TypeDecl {
  std::string name;
  std::optional<SymbolId> parent;  // empty only for the root type
  bool operator==(const TypeDecl&) const = default;
};

struct ObjectDecl {
  std::string name;
  SymbolId type = 0;
  bool constant = false;  // declared in the domain rather than the problem
  bool operator==(const ObjectDecl&) const = default;
};

struct Parameter {
  std::string name;  // without the leading '?'
  SymbolId type = 0;
  bool operator==(const Parameter&) const = default;
};

/// Predicates and numeric fluents share this shape.
struct SymbolDecl {
  std::string name;
  std::vector<Parameter> params;
  bool operator==(const SymbolDecl&) const = default;
};

struct Term {
  enum class Kind : std::uint8_t { Parameter, Object };
  Kind kind = Kind::Object;
  SymbolId index = 0;

  static Term parameter(SymbolId i) { return {Kind::Parameter, i}; }
  static Term object(SymbolId i) { return {Kind::Object, i}; }
  bool operator==(const Term&) const = default;
};

struct Atom {
  SymbolId symbol = 0;  // predicate or fluent id, depending on context
  std::vector<Term> args;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;
  bool operator==(const Literal&) const = default;
};

enum class Comparator : std::uint8_t { Less, LessEq, Equal, GreaterEq, Greater };

std::string_view to_string(Comparator op);
bool compare(std::int64_t lhs, Comparator op, std::int64_t rhs);

struct NumericComparison {
  Atom fluent;
  Comparator op = Comparator::Equal;
  std::int64_t value = 0;
  bool operator==(const NumericComparison&) const = default;
};

using Conjunct = std::variant<Literal, NumericComparison>;

/// A pure conjunction of literals and numeric comparisons.
struct Condition {
  std::vector<Conjunct> conjuncts;
  bool empty() const { return conjuncts.empty(); }
  bool operator==(const Condition&) const = default;
};

struct AtomEffect {
  Atom atom;
  bool add = true;
  bool operator==(const AtomEffect&) const = default;
};

enum class NumericOp : std::uint8_t { Assign, Increase, Decrease };
std::string_view to_string(NumericOp op);

struct NumericEffect {
  Atom fluent;
  NumericOp op = NumericOp::Assign;
  std::int64_t value = 0;
  bool operator==(const NumericEffect&) const = default;
};

/// increase(danger, delta); only ever created by compile_augmented.
struct DangerEffect {
  std::size_t rule = 0;
  std::int64_t delta = 0;
  bool operator==(const DangerEffect&) const = default;
};

using SimpleEffect = std::variant<AtomEffect, NumericEffect, DangerEffect>;

struct ConditionalEffect {
  Condition condition;
  /// Per-parameter object restriction; empty means unrestricted.
  std::vector<std::optional<SymbolId>> binding;
  std::vector<SimpleEffect> effects;
  bool operator==(const ConditionalEffect&) const = default;
};

using Effect = std::variant<AtomEffect, NumericEffect, ConditionalEffect>;

struct ActionSchema {
  std::string name;
  std::vector<Parameter> params;
  Condition precondition;
  std::vector<Effect> effects;
  bool operator==(const ActionSchema&) const = default;
};

/// Types, objects, fluent declarations and action schemas. Identifiers are
/// stored canonicalized (see canonical_identifier). Type 0 is always "object".
class Domain {
 public:
  Domain();

  std::string name;

  const std::vector<TypeDecl>& types() const { return types_; }
  const std::vector<ObjectDecl>& objects() const { return objects_; }
  const std::vector<SymbolDecl>& predicates() const { return predicates_; }
  const std::vector<SymbolDecl>& fluents() const { return fluents_; }
  const std::vector<ActionSchema>& actions() const { return actions_; }

  // Builders throw DuplicateSymbol / TypeCycle / ReservedFluentDeclared.
  SymbolId add_type(std::string_view name, std::optional<SymbolId> parent = SymbolId{0});
  void set_type_parent(SymbolId type, SymbolId parent);
  SymbolId add_object(std::string_view name, SymbolId type, bool constant = false);
  SymbolId add_predicate(std::string_view name, std::vector<Parameter> params);
  SymbolId add_fluent(std::string_view name, std::vector<Parameter> params);
  SymbolId add_action(ActionSchema schema);
  ActionSchema& mutable_action(SymbolId index) { return actions_.at(index); }

  std::optional<SymbolId> find_type(std::string_view name) const;
  std::optional<SymbolId> find_object(std::string_view name) const;
  std::optional<SymbolId> find_predicate(std::string_view name) const;
  std::optional<SymbolId> find_fluent(std::string_view name) const;
  std::optional<SymbolId> find_action(std::string_view name) const;

  /// True if `type` equals `ancestor` or descends from it.
  bool is_subtype(SymbolId type, SymbolId ancestor) const;

  /// True if any action carries a compiler-injected danger effect.
  bool has_danger_effects() const;

  bool operator==(const Domain& other) const;

 private:
  std::vector<TypeDecl> types_;
  std::vector<ObjectDecl> objects_;
  std::vector<SymbolDecl> predicates_;
  std::vector<SymbolDecl> fluents_;
  std::vector<ActionSchema> actions_;
  std::unordered_map<std::string, SymbolId> type_index_;
  std::unordered_map<std::string, SymbolId> object_index_;
  std::unordered_map<std::string, SymbolId> predicate_index_;
  std::unordered_map<std::string, SymbolId> fluent_index_;
  std::unordered_map<std::string, SymbolId> action_index_;
};

/// A ground atom or ground numeric fluent: symbol id plus object ids.
struct GroundAtom {
  SymbolId symbol = 0;
  std::vector<SymbolId> args;
  auto operator<=>(const GroundAtom&) const = default;
  bool operator==(const GroundAtom&) const = default;
};

/// Grounded world snapshot. Atoms and fluents are kept sorted so equality and
/// hashing are canonical. Unassigned numeric fluents read as 0.
class State {
 public:
  bool holds(const GroundAtom& atom) const;
  void add(const GroundAtom& atom);
  void remove(const GroundAtom& atom);

  std::int64_t value(const GroundAtom& fluent) const;
  bool has_value(const GroundAtom& fluent) const;
  void set_value(const GroundAtom& fluent, std::int64_t v);

  const std::vector<GroundAtom>& atoms() const { return atoms_; }
  const std::vector<std::pair<GroundAtom, std::int64_t>>& fluents() const { return fluents_; }

  /// The danger counter; present only for augmented execution.
  std::optional<std::int64_t> danger;

  std::size_t hash() const;
  bool operator==(const State&) const = default;

 private:
  std::vector<GroundAtom> atoms_;
  std::vector<std::pair<GroundAtom, std::int64_t>> fluents_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundAction {
  SymbolId schema = 0;
  std::vector<SymbolId> args;
  auto operator<=>(const GroundAction&) const = default;
  bool operator==(const GroundAction&) const = default;
};

/// Schema-level danger rule: when `action` executes with arguments
/// matching `binding` in a state satisfying `condition`, danger += delta.
struct DangerRule {
  std::string action;  // canonical schema name
  std::vector<std::optional<std::string>> binding;  // nullopt = wildcard
  Condition condition;  // may reference the schema's parameters
  std::int64_t delta = 0;
  bool operator==(const DangerRule&) const = default;
};

struct BasicProblem {
  std::string name;
  std::shared_ptr<const Domain> domain;
  State init;
  Condition goal;

  bool operator==(const BasicProblem& other) const;
};

struct AugmentedProblem {
  BasicProblem basic;
  std::shared_ptr<const Domain> domain;  // basic domain + injected danger effects
  std::vector<DangerRule> rules;
  std::int64_t d_init = 0;
  std::int64_t d_max = 0;

  State initial_state() const;
};

inline constexpr std::int64_t kMaxInitialDanger = 1'000'000'000;

/// Instantiates `schema` with concrete objects (by name).
/// Errors: UnknownSchema, ArityMismatch, TypeMismatch, UnknownSymbol.
GroundAction ground(const Domain& domain, std::string_view schema,
                    const std::vector<std::string>& args);
GroundAction ground(const Domain& domain, SymbolId schema, const std::vector<SymbolId>& args);

/// Builds the safety-augmented problem. Each rule becomes a conditional effect
/// `when condition then increase(danger, delta)` on its schema, restricted to
/// the rule's binding; the goal gains `danger <= d_max` implicitly through
/// AugmentedProblem::d_max.
/// Errors: ReservedFluentDeclared, AlreadyCompiled, UnknownSchemaInRule,
/// BindingArityMismatch, InvalidDelta, UnknownSymbol, InvalidArgument.
AugmentedProblem compile_augmented(const BasicProblem& basic, std::vector<DangerRule> rules,
                                   std::int64_t d_init = 0, std::int64_t d_max = 0);

// Grounding helpers shared by the executors.
GroundAtom substitute(const Atom& atom, const std::vector<SymbolId>& args);
bool satisfied(const State& state, const Conjunct& conjunct, const std::vector<SymbolId>& args);
bool satisfied(const State& state, const Condition& condition, const std::vector<SymbolId>& args);
bool binding_matches(const ConditionalEffect& effect, const std::vector<SymbolId>& args);

/// "pred(a, b)" style rendering used in diagnostics and prompts.
std::string format_atom(const Domain& domain, const GroundAtom& atom, bool fluent = false);
std::string format_action(const Domain& domain, const GroundAction& action);
std::string format_conjunct(const Domain& domain, const Conjunct& conjunct,
                            const std::vector<SymbolId>& args);

} // namespace safeplan
