#include "safeplan/noise.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "safeplan/error.hpp"
#include "safeplan/pddl.hpp"
#include "safeplan/random.hpp"

namespace safeplan {

namespace {

void validate(const NoiseLevel& level) {
  if (level.allow_arbitrary) return;
  if (std::find(std::begin(kNoiseLadder), std::end(kNoiseLadder), level.count) == std::end(kNoiseLadder)) {
    throw Error(ErrorCode::InvalidNoiseLevel,
                "noise count " + std::to_string(level.count) + " is not one of 2,4,8,16,32,64");
  }
}

/// First of base, base_2, base_3, ... not yet taken.
template <typename Taken>
std::string fresh(const std::string& base, Taken&& taken) {
  if (!taken(base)) return base;
  for (int i = 2;; ++i) {
    auto name = base + "_" + std::to_string(i);
    if (!taken(name)) return name;
  }
}

struct Vocabulary {
  std::set<SymbolId> predicates;
  std::set<SymbolId> fluents;
  std::set<SymbolId> objects;
};

void collect(const Atom& atom, bool fluent, Vocabulary& v) {
  (fluent ? v.fluents : v.predicates).insert(atom.symbol);
  for (const auto& t : atom.args) {
    if (t.kind == Term::Kind::Object) v.objects.insert(t.index);
  }
}

void collect(const Condition& c, Vocabulary& v) {
  for (const auto& conj : c.conjuncts) {
    if (const auto* lit = std::get_if<Literal>(&conj)) {
      collect(lit->atom, false, v);
    } else {
      collect(std::get<NumericComparison>(conj).fluent, true, v);
    }
  }
}

void collect(const SimpleEffect& e, Vocabulary& v) {
  if (const auto* a = std::get_if<AtomEffect>(&e)) collect(a->atom, false, v);
  if (const auto* n = std::get_if<NumericEffect>(&e)) collect(n->fluent, true, v);
}

void collect(const ActionSchema& schema, Vocabulary& v) {
  collect(schema.precondition, v);
  for (const auto& e : schema.effects) {
    if (const auto* a = std::get_if<AtomEffect>(&e)) collect(a->atom, false, v);
    if (const auto* n = std::get_if<NumericEffect>(&e)) collect(n->fluent, true, v);
    if (const auto* c = std::get_if<ConditionalEffect>(&e)) {
      collect(c->condition, v);
      for (const auto& s : c->effects) collect(s, v);
    }
  }
}

template <typename T>
bool intersects(const std::set<T>& a, const std::set<T>& b) {
  return std::any_of(a.begin(), a.end(), [&](const T& x) { return b.count(x) > 0; });
}

} // namespace

void check_noise_isolation(const TaskBundle& bundle, const std::vector<SymbolId>& noise_schemas) {
  const Domain& domain = *bundle.augmented.domain;
  std::set<SymbolId> noise_set(noise_schemas.begin(), noise_schemas.end());
  Vocabulary noise;
  std::set<SymbolId> noise_types;
  for (auto s : noise_schemas) {
    const auto& schema = domain.actions().at(s);
    collect(schema, noise);
    for (const auto& p : schema.params) noise_types.insert(p.type);
  }
  for (SymbolId o = 0; o < domain.objects().size(); ++o) {
    for (auto t : noise_types) {
      if (domain.is_subtype(domain.objects()[o].type, t)) noise.objects.insert(o);
    }
  }
  auto collide = [&](const std::string& what) {
    throw Error(ErrorCode::VocabularyCollision, "noise vocabulary overlaps " + what);
  };
  if (!noise.fluents.empty()) collide("numeric fluents");

  Vocabulary goal;
  collect(bundle.augmented.basic.goal, goal);
  if (intersects(goal.predicates, noise.predicates) || intersects(goal.objects, noise.objects)) collide("the goal");

  for (const auto& rule : bundle.augmented.rules) {
    Vocabulary v;
    collect(rule.condition, v);
    if (intersects(v.predicates, noise.predicates) || intersects(v.objects, noise.objects)) {
      collide("the danger rule on " + rule.action);
    }
    if (domain.find_action(rule.action) && noise_set.count(*domain.find_action(rule.action))) {
      collide("the danger rule on " + rule.action);
    }
  }
  for (SymbolId s = 0; s < domain.actions().size(); ++s) {
    if (noise_set.count(s)) continue;
    Vocabulary v;
    collect(domain.actions()[s], v);
    if (intersects(v.predicates, noise.predicates) || intersects(v.objects, noise.objects)) {
      collide("schema " + domain.actions()[s].name);
    }
  }
}

TaskBundle inject(const TaskBundle& bundle, const NoiseLevel& level) {
  validate(level);
  if (level.count == 0) return bundle;

  const Domain& base = *bundle.basic.domain;
  auto taken = [&](const std::string& n) {
    return base.find_type(n) || base.find_object(n) || base.find_predicate(n) || base.find_fluent(n) ||
           base.find_action(n) || n == kDangerFluent;
  };

  // Copy the domain symbol tables in index order so every id in the basic
  // problem and danger rules keeps its meaning.
  auto domain = std::make_shared<Domain>();
  domain->name = base.name;
  for (SymbolId t = 1; t < base.types().size(); ++t) domain->add_type(base.types()[t].name);
  for (SymbolId t = 1; t < base.types().size(); ++t) {
    if (base.types()[t].parent) domain->set_type_parent(t, *base.types()[t].parent);
  }
  for (const auto& o : base.objects()) domain->add_object(o.name, o.type, o.constant);
  for (const auto& p : base.predicates()) domain->add_predicate(p.name, p.params);
  for (const auto& f : base.fluents()) domain->add_fluent(f.name, f.params);

  SymbolId noise_type = domain->add_type(fresh("noise_item", taken));
  std::vector<ActionSchema> schemas = base.actions();
  std::vector<std::string> noise_names;
  for (std::size_t i = 1; i <= level.count; ++i) {
    auto suffix = std::to_string(i);
    domain->add_object(fresh("noise_obj_" + suffix, taken), noise_type);
    SymbolId pred = domain->add_predicate(fresh("noise_flag_" + suffix, taken), {Parameter{"o", noise_type}});

    ActionSchema schema;
    schema.name = fresh("noise_act_" + suffix, taken);
    schema.params = {Parameter{"o", noise_type}};
    Atom flag{pred, {Term::parameter(0)}};
    schema.effects.push_back(ConditionalEffect{Condition{{Literal{flag, false}}}, {}, {AtomEffect{flag, false}}});
    schema.effects.push_back(ConditionalEffect{Condition{{Literal{flag, true}}}, {}, {AtomEffect{flag, true}}});
    noise_names.push_back(schema.name);
    schemas.push_back(std::move(schema));
  }

  std::vector<std::size_t> order(schemas.size());
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(level.seed, level.count);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  for (auto i : order) domain->add_action(schemas[i]);

  BasicProblem basic = bundle.basic;
  basic.domain = domain;
  auto domain_text = render_domain_pddl(*domain);
  auto problem_text = render_problem_pddl(basic);

  TaskBundle out = make_bundle(bundle.id, domain_text, problem_text, bundle.danger_text, bundle.meta);
  out.ref_safe_plan = bundle.ref_safe_plan;
  out.ref_feasible_plan = bundle.ref_feasible_plan;

  std::vector<SymbolId> ids;
  for (const auto& n : noise_names) {
    auto id = out.augmented.domain->find_action(n);
    if (!id) throw Error(ErrorCode::VocabularyCollision, "distractor " + n + " was lost in rendering");
    ids.push_back(*id);
  }
  check_noise_isolation(out, ids);
  return out;
}

} // namespace safeplan
