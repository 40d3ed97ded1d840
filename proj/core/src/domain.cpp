#include "safeplan/domain.hpp"

#include <algorithm>
#include <limits>

#include "safeplan/error.hpp"
#include "safeplan/identifier.hpp"

namespace safeplan {

std::string_view to_string(Comparator op) {
  switch (op) {
    case Comparator::Less: return "<";
    case Comparator::LessEq: return "<=";
    case Comparator::Equal: return "=";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Greater: return ">";
  }
  return "?";
}

bool compare(std::int64_t lhs, Comparator op, std::int64_t rhs) {
  switch (op) {
    case Comparator::Less: return lhs < rhs;
    case Comparator::LessEq: return lhs <= rhs;
    case Comparator::Equal: return lhs == rhs;
    case Comparator::GreaterEq: return lhs >= rhs;
    case Comparator::Greater: return lhs > rhs;
  }
  return false;
}

std::string_view to_string(NumericOp op) {
  switch (op) {
    case NumericOp::Assign: return "assign";
    case NumericOp::Increase: return "increase";
    case NumericOp::Decrease: return "decrease";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Domain

namespace {

void check_not_reserved(const std::string& canonical) {
  if (canonical == kDangerFluent) {
    throw Error(ErrorCode::ReservedFluentDeclared,
                "the identifier 'danger' is reserved for the danger counter");
  }
}

std::optional<SymbolId> lookup(const std::unordered_map<std::string, SymbolId>& index,
                               std::string_view name) {
  auto it = index.find(canonical_identifier(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

bool contains_danger(const std::vector<SimpleEffect>& effects) {
  return std::any_of(effects.begin(), effects.end(), [](const SimpleEffect& e) {
    return std::holds_alternative<DangerEffect>(e);
  });
}

} // namespace

Domain::Domain() {
  types_.push_back(TypeDecl{std::string(kRootType), std::nullopt});
  type_index_.emplace(std::string(kRootType), 0);
}

SymbolId Domain::add_type(std::string_view raw, std::optional<SymbolId> parent) {
  std::string name = canonical_identifier(raw);
  if (type_index_.count(name)) {
    throw Error(ErrorCode::DuplicateSymbol, "type '" + name + "' declared twice");
  }
  if (parent && *parent >= types_.size()) {
    throw Error(ErrorCode::UnknownSymbol, "unknown parent type for '" + name + "'");
  }
  auto id = static_cast<SymbolId>(types_.size());
  types_.push_back(TypeDecl{name, parent.value_or(0)});
  type_index_.emplace(name, id);
  return id;
}

void Domain::set_type_parent(SymbolId type, SymbolId parent) {
  if (type == 0) {
    throw Error(ErrorCode::TypeCycle, "the root type 'object' cannot have a parent");
  }
  // Walk up from the new parent; reaching `type` means a cycle.
  for (std::optional<SymbolId> cur = parent; cur; cur = types_.at(*cur).parent) {
    if (*cur == type) {
      throw Error(ErrorCode::TypeCycle,
                  "type '" + types_.at(type).name + "' would become its own ancestor");
    }
  }
  types_.at(type).parent = parent;
}

SymbolId Domain::add_object(std::string_view raw, SymbolId type, bool constant) {
  std::string name = canonical_identifier(raw);
  if (object_index_.count(name)) {
    throw Error(ErrorCode::DuplicateSymbol, "object '" + name + "' declared twice");
  }
  if (type >= types_.size()) {
    throw Error(ErrorCode::UnknownSymbol, "unknown type for object '" + name + "'");
  }
  auto id = static_cast<SymbolId>(objects_.size());
  objects_.push_back(ObjectDecl{name, type, constant});
  object_index_.emplace(name, id);
  return id;
}

SymbolId Domain::add_predicate(std::string_view raw, std::vector<Parameter> params) {
  std::string name = canonical_identifier(raw);
  check_not_reserved(name);
  if (predicate_index_.count(name) || fluent_index_.count(name)) {
    throw Error(ErrorCode::DuplicateSymbol, "fluent '" + name + "' declared twice");
  }
  auto id = static_cast<SymbolId>(predicates_.size());
  predicates_.push_back(SymbolDecl{name, std::move(params)});
  predicate_index_.emplace(name, id);
  return id;
}

SymbolId Domain::add_fluent(std::string_view raw, std::vector<Parameter> params) {
  std::string name = canonical_identifier(raw);
  check_not_reserved(name);
  if (predicate_index_.count(name) || fluent_index_.count(name)) {
    throw Error(ErrorCode::DuplicateSymbol, "fluent '" + name + "' declared twice");
  }
  auto id = static_cast<SymbolId>(fluents_.size());
  fluents_.push_back(SymbolDecl{name, std::move(params)});
  fluent_index_.emplace(name, id);
  return id;
}

SymbolId Domain::add_action(ActionSchema schema) {
  schema.name = canonical_identifier(schema.name);
  if (action_index_.count(schema.name)) {
    throw Error(ErrorCode::DuplicateSymbol, "action '" + schema.name + "' declared twice");
  }
  auto id = static_cast<SymbolId>(actions_.size());
  action_index_.emplace(schema.name, id);
  actions_.push_back(std::move(schema));
  return id;
}

std::optional<SymbolId> Domain::find_type(std::string_view name) const {
  return lookup(type_index_, name);
}
std::optional<SymbolId> Domain::find_object(std::string_view name) const {
  return lookup(object_index_, name);
}
std::optional<SymbolId> Domain::find_predicate(std::string_view name) const {
  return lookup(predicate_index_, name);
}
std::optional<SymbolId> Domain::find_fluent(std::string_view name) const {
  return lookup(fluent_index_, name);
}
std::optional<SymbolId> Domain::find_action(std::string_view name) const {
  return lookup(action_index_, name);
}

bool Domain::is_subtype(SymbolId type, SymbolId ancestor) const {
  for (std::optional<SymbolId> cur = type; cur; cur = types_.at(*cur).parent) {
    if (*cur == ancestor) return true;
  }
  return false;
}

bool Domain::has_danger_effects() const {
  for (const auto& action : actions_) {
    for (const auto& effect : action.effects) {
      if (const auto* cond = std::get_if<ConditionalEffect>(&effect)) {
        if (contains_danger(cond->effects)) return true;
      }
    }
  }
  return false;
}

bool Domain::operator==(const Domain& other) const {
  return name == other.name && types_ == other.types_ && objects_ == other.objects_ &&
         predicates_ == other.predicates_ && fluents_ == other.fluents_ &&
         actions_ == other.actions_;
}

// ---------------------------------------------------------------------------
// State

bool State::holds(const GroundAtom& atom) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

void State::add(const GroundAtom& atom) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), atom);
  if (it == atoms_.end() || *it != atom) atoms_.insert(it, atom);
}

void State::remove(const GroundAtom& atom) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), atom);
  if (it != atoms_.end() && *it == atom) atoms_.erase(it);
}

namespace {
auto fluent_lower_bound(std::vector<std::pair<GroundAtom, std::int64_t>>& v, const GroundAtom& key) {
  return std::lower_bound(v.begin(), v.end(), key,
                          [](const auto& entry, const GroundAtom& k) { return entry.first < k; });
}
auto fluent_lower_bound(const std::vector<std::pair<GroundAtom, std::int64_t>>& v,
                        const GroundAtom& key) {
  return std::lower_bound(v.begin(), v.end(), key,
                          [](const auto& entry, const GroundAtom& k) { return entry.first < k; });
}
} // namespace

std::int64_t State::value(const GroundAtom& fluent) const {
  auto it = fluent_lower_bound(fluents_, fluent);
  if (it != fluents_.end() && it->first == fluent) return it->second;
  return 0;
}

bool State::has_value(const GroundAtom& fluent) const {
  auto it = fluent_lower_bound(fluents_, fluent);
  return it != fluents_.end() && it->first == fluent;
}

void State::set_value(const GroundAtom& fluent, std::int64_t v) {
  auto it = fluent_lower_bound(fluents_, fluent);
  if (it != fluents_.end() && it->first == fluent) {
    it->second = v;
  } else {
    fluents_.insert(it, {fluent, v});
  }
}

std::size_t State::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& a : atoms_) {
    mix(a.symbol);
    for (auto x : a.args) mix(x);
    mix(0xffffULL);
  }
  mix(0xabcdefULL);
  for (const auto& [f, v] : fluents_) {
    mix(f.symbol);
    for (auto x : f.args) mix(x);
    mix(static_cast<std::uint64_t>(v));
  }
  if (danger) mix(static_cast<std::uint64_t>(*danger) ^ 0x5555ULL);
  return static_cast<std::size_t>(h);
}

bool BasicProblem::operator==(const BasicProblem& other) const {
  if (name != other.name || !(init == other.init) || !(goal == other.goal)) return false;
  if (domain == other.domain) return true;
  if (!domain || !other.domain) return false;
  return *domain == *other.domain;
}

State AugmentedProblem::initial_state() const {
  State s = basic.init;
  s.danger = d_init;
  return s;
}

// ---------------------------------------------------------------------------
// Grounding

GroundAction ground(const Domain& domain, SymbolId schema, const std::vector<SymbolId>& args) {
  if (schema >= domain.actions().size()) {
    throw Error(ErrorCode::UnknownSchema, "no action schema with index " + std::to_string(schema));
  }
  const auto& s = domain.actions()[schema];
  if (args.size() != s.params.size()) {
    throw Error(ErrorCode::ArityMismatch, display_action_name(s.name) + " expects " +
                                              std::to_string(s.params.size()) + " argument(s), got " +
                                              std::to_string(args.size()));
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] >= domain.objects().size()) {
      throw Error(ErrorCode::UnknownSymbol, "object index out of range");
    }
    const auto& obj = domain.objects()[args[i]];
    const auto& param = s.params[i];
    if (!domain.is_subtype(obj.type, param.type)) {
      throw Error(ErrorCode::TypeMismatch,
                  display_action_name(s.name) + ": argument " + std::to_string(i + 1) + " '" +
                      obj.name + "' has type " + domain.types()[obj.type].name + ", expected " +
                      domain.types()[param.type].name);
    }
  }
  return GroundAction{schema, args};
}

GroundAction ground(const Domain& domain, std::string_view schema,
                    const std::vector<std::string>& args) {
  auto index = domain.find_action(schema);
  if (!index) {
    throw Error(ErrorCode::UnknownSchema, "unknown action '" + std::string(schema) + "'");
  }
  const auto& s = domain.actions()[*index];
  if (args.size() != s.params.size()) {
    throw Error(ErrorCode::ArityMismatch, display_action_name(s.name) + " expects " +
                                              std::to_string(s.params.size()) + " argument(s), got " +
                                              std::to_string(args.size()));
  }
  std::vector<SymbolId> ids;
  ids.reserve(args.size());
  for (const auto& name : args) {
    auto obj = domain.find_object(name);
    if (!obj) throw Error(ErrorCode::UnknownSymbol, "unknown object '" + name + "'");
    ids.push_back(*obj);
  }
  return ground(domain, *index, ids);
}

GroundAtom substitute(const Atom& atom, const std::vector<SymbolId>& args) {
  GroundAtom out{atom.symbol, {}};
  out.args.reserve(atom.args.size());
  for (const auto& t : atom.args) {
    out.args.push_back(t.kind == Term::Kind::Parameter ? args.at(t.index) : t.index);
  }
  return out;
}

bool satisfied(const State& state, const Conjunct& conjunct, const std::vector<SymbolId>& args) {
  if (const auto* lit = std::get_if<Literal>(&conjunct)) {
    return state.holds(substitute(lit->atom, args)) != lit->negated;
  }
  const auto& cmp = std::get<NumericComparison>(conjunct);
  return compare(state.value(substitute(cmp.fluent, args)), cmp.op, cmp.value);
}

bool satisfied(const State& state, const Condition& condition, const std::vector<SymbolId>& args) {
  for (const auto& c : condition.conjuncts) {
    if (!satisfied(state, c, args)) return false;
  }
  return true;
}

bool binding_matches(const ConditionalEffect& effect, const std::vector<SymbolId>& args) {
  for (std::size_t i = 0; i < effect.binding.size() && i < args.size(); ++i) {
    if (effect.binding[i] && *effect.binding[i] != args[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Augmentation

namespace {

void check_no_danger_reference(const Domain& domain) {
  if (domain.find_predicate(kDangerFluent) || domain.find_fluent(kDangerFluent)) {
    throw Error(ErrorCode::ReservedFluentDeclared, "basic problem declares 'danger'");
  }
  if (domain.has_danger_effects()) {
    throw Error(ErrorCode::AlreadyCompiled, "basic problem already carries danger effects");
  }
}

void check_condition_terms(const Condition& condition, std::size_t arity, const std::string& rule) {
  auto check = [&](const Atom& atom) {
    for (const auto& t : atom.args) {
      if (t.kind == Term::Kind::Parameter && t.index >= arity) {
        throw Error(ErrorCode::UnknownSymbol,
                    "danger rule on " + rule + " references an unbound parameter");
      }
    }
  };
  for (const auto& c : condition.conjuncts) {
    if (const auto* lit = std::get_if<Literal>(&c)) {
      check(lit->atom);
    } else {
      check(std::get<NumericComparison>(c).fluent);
    }
  }
}

} // namespace

AugmentedProblem compile_augmented(const BasicProblem& basic, std::vector<DangerRule> rules,
                                   std::int64_t d_init, std::int64_t d_max) {
  if (!basic.domain) throw Error(ErrorCode::InvalidArgument, "basic problem has no domain");
  check_no_danger_reference(*basic.domain);
  if (d_init > kMaxInitialDanger || d_init < -kMaxInitialDanger) {
    throw Error(ErrorCode::InvalidArgument, "d_init outside the supported range");
  }

  auto augmented = std::make_shared<Domain>(*basic.domain);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    auto& rule = rules[r];
    rule.action = canonical_identifier(rule.action);
    auto schema_id = augmented->find_action(rule.action);
    if (!schema_id) {
      throw Error(ErrorCode::UnknownSchemaInRule,
                  "danger rule references unknown action '" + rule.action + "'");
    }
    auto& schema = augmented->mutable_action(*schema_id);
    if (rule.binding.size() != schema.params.size()) {
      throw Error(ErrorCode::BindingArityMismatch,
                  "danger rule on " + display_action_name(rule.action) + " binds " +
                      std::to_string(rule.binding.size()) + " argument(s), schema has " +
                      std::to_string(schema.params.size()));
    }
    if (rule.delta == 0) {
      throw Error(ErrorCode::InvalidDelta, "danger rule on " + display_action_name(rule.action) +
                                               " has delta 0");
    }
    check_condition_terms(rule.condition, schema.params.size(), display_action_name(rule.action));

    ConditionalEffect injected;
    injected.condition = rule.condition;
    injected.binding.resize(schema.params.size());
    for (std::size_t i = 0; i < rule.binding.size(); ++i) {
      if (!rule.binding[i]) continue;
      auto& bound = *rule.binding[i];
      bound = canonical_identifier(bound);
      auto obj = augmented->find_object(bound);
      if (!obj) {
        throw Error(ErrorCode::UnknownSymbol, "danger rule binds unknown object '" + bound + "'");
      }
      if (!augmented->is_subtype(augmented->objects()[*obj].type, schema.params[i].type)) {
        throw Error(ErrorCode::TypeMismatch, "danger rule binding '" + bound +
                                                 "' does not match the type of parameter ?" +
                                                 schema.params[i].name);
      }
      injected.binding[i] = *obj;
    }
    injected.effects.push_back(DangerEffect{r, rule.delta});
    schema.effects.push_back(std::move(injected));
  }

  AugmentedProblem out;
  out.basic = basic;
  out.domain = std::move(augmented);
  out.rules = std::move(rules);
  out.d_init = d_init;
  out.d_max = d_max;
  return out;
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_atom(const Domain& domain, const GroundAtom& atom, bool fluent) {
  std::string out = fluent ? domain.fluents().at(atom.symbol).name
                           : domain.predicates().at(atom.symbol).name;
  out += "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ", ";
    out += domain.objects().at(atom.args[i]).name;
  }
  out += ")";
  return out;
}

std::string format_action(const Domain& domain, const GroundAction& action) {
  std::string out = display_action_name(domain.actions().at(action.schema).name);
  out += "(";
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (i) out += ", ";
    out += domain.objects().at(action.args[i]).name;
  }
  out += ")";
  return out;
}

std::string format_conjunct(const Domain& domain, const Conjunct& conjunct,
                            const std::vector<SymbolId>& args) {
  if (const auto* lit = std::get_if<Literal>(&conjunct)) {
    std::string a = format_atom(domain, substitute(lit->atom, args));
    return lit->negated ? "not " + a : a;
  }
  const auto& cmp = std::get<NumericComparison>(conjunct);
  return format_atom(domain, substitute(cmp.fluent, args), true) + " " +
         std::string(to_string(cmp.op)) + " " + std::to_string(cmp.value);
}

} // namespace safeplan
