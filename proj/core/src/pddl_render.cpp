#include <sstream>

#include "safeplan/pddl.hpp"

namespace safeplan {

namespace {

std::string render_term(const Domain& domain, const Term& t, const std::vector<Parameter>& params) {
  if (t.kind == Term::Kind::Parameter) return "?" + params.at(t.index).name;
  return domain.objects().at(t.index).name;
}

std::string render_atom(const Domain& domain, const Atom& atom, bool fluent,
                        const std::vector<Parameter>& params) {
  std::string out = "(" + (fluent ? domain.fluents().at(atom.symbol).name
                                  : domain.predicates().at(atom.symbol).name);
  for (const auto& t : atom.args) out += " " + render_term(domain, t, params);
  return out + ")";
}

std::string render_conjunct(const Domain& domain, const Conjunct& c, const std::vector<Parameter>& params) {
  if (const auto* lit = std::get_if<Literal>(&c)) {
    auto a = render_atom(domain, lit->atom, false, params);
    return lit->negated ? "(not " + a + ")" : a;
  }
  const auto& cmp = std::get<NumericComparison>(c);
  return "(" + std::string(to_string(cmp.op)) + " " + render_atom(domain, cmp.fluent, true, params) +
         " " + std::to_string(cmp.value) + ")";
}

std::string render_simple(const Domain& domain, const SimpleEffect& e, const std::vector<Parameter>& params) {
  if (const auto* a = std::get_if<AtomEffect>(&e)) {
    auto s = render_atom(domain, a->atom, false, params);
    return a->add ? s : "(not " + s + ")";
  }
  if (const auto* n = std::get_if<NumericEffect>(&e)) {
    return "(" + std::string(to_string(n->op)) + " " + render_atom(domain, n->fluent, true, params) +
           " " + std::to_string(n->value) + ")";
  }
  const auto& d = std::get<DangerEffect>(e);
  return "(increase (danger) " + std::to_string(d.delta) + ")";
}

std::string typed(const std::string& name, const Domain& domain, SymbolId type) {
  return name + " - " + domain.types().at(type).name;
}

std::string render_params(const Domain& domain, const std::vector<Parameter>& params) {
  std::string out = "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += " ";
    out += typed("?" + params[i].name, domain, params[i].type);
  }
  return out + ")";
}

} // namespace

std::string render_condition_pddl(const Domain& domain, const Condition& condition,
                                  const std::vector<Parameter>& params) {
  if (condition.conjuncts.size() == 1) return render_conjunct(domain, condition.conjuncts.front(), params);
  std::string out = "(and";
  for (const auto& c : condition.conjuncts) out += " " + render_conjunct(domain, c, params);
  return out + ")";
}

std::string render_domain_pddl(const Domain& domain) {
  std::ostringstream os;
  os << "(define (domain " << domain.name << ")\n";
  os << "  (:requirements :strips :typing :negative-preconditions :conditional-effects"
     << (domain.fluents().empty() ? "" : " :numeric-fluents") << ")\n";
  if (domain.types().size() > 1) {
    os << "  (:types";
    for (std::size_t i = 1; i < domain.types().size(); ++i) {
      const auto& t = domain.types()[i];
      os << " " << typed(t.name, domain, t.parent.value_or(0));
    }
    os << ")\n";
  }
  bool any_constant = false;
  for (const auto& o : domain.objects()) any_constant |= o.constant;
  if (any_constant) {
    os << "  (:constants";
    for (const auto& o : domain.objects()) {
      if (o.constant) os << " " << typed(o.name, domain, o.type);
    }
    os << ")\n";
  }
  auto decls = [&](const char* section, const std::vector<SymbolDecl>& symbols) {
    os << "  (" << section;
    for (const auto& s : symbols) {
      os << " (" << s.name;
      for (const auto& p : s.params) os << " " << typed("?" + p.name, domain, p.type);
      os << ")";
    }
    os << ")\n";
  };
  if (!domain.predicates().empty()) decls(":predicates", domain.predicates());
  if (!domain.fluents().empty()) decls(":functions", domain.fluents());
  for (const auto& a : domain.actions()) {
    os << "  (:action " << a.name << "\n";
    os << "    :parameters " << render_params(domain, a.params) << "\n";
    os << "    :precondition (and";
    for (const auto& c : a.precondition.conjuncts) os << " " << render_conjunct(domain, c, a.params);
    os << ")\n";
    os << "    :effect (and";
    for (const auto& e : a.effects) {
      if (const auto* cond = std::get_if<ConditionalEffect>(&e)) {
        os << " (when (and";
        for (const auto& c : cond->condition.conjuncts) os << " " << render_conjunct(domain, c, a.params);
        os << ") (and";
        for (const auto& s : cond->effects) os << " " << render_simple(domain, s, a.params);
        os << "))";
      } else if (const auto* atom = std::get_if<AtomEffect>(&e)) {
        os << " " << render_simple(domain, *atom, a.params);
      } else {
        os << " " << render_simple(domain, std::get<NumericEffect>(e), a.params);
      }
    }
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string render_problem_pddl(const BasicProblem& problem) {
  const auto& domain = *problem.domain;
  std::ostringstream os;
  os << "(define (problem " << problem.name << ")\n";
  os << "  (:domain " << domain.name << ")\n";
  bool any_object = false;
  for (const auto& o : domain.objects()) any_object |= !o.constant;
  if (any_object) {
    os << "  (:objects";
    for (const auto& o : domain.objects()) {
      if (!o.constant) os << " " << typed(o.name, domain, o.type);
    }
    os << ")\n";
  }
  static const std::vector<Parameter> kNone;
  auto ground = [&](const GroundAtom& g, bool fluent) {
    Atom a{g.symbol, {}};
    for (auto x : g.args) a.args.push_back(Term::object(x));
    return render_atom(domain, a, fluent, kNone);
  };
  os << "  (:init";
  for (const auto& a : problem.init.atoms()) os << "\n    " << ground(a, false);
  for (const auto& [f, v] : problem.init.fluents()) os << "\n    (= " << ground(f, true) << " " << v << ")";
  os << ")\n";
  os << "  (:goal (and";
  for (const auto& c : problem.goal.conjuncts) os << " " << render_conjunct(domain, c, kNone);
  os << "))\n";
  os << ")\n";
  return os.str();
}

} // namespace safeplan
