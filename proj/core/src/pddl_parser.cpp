#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "safeplan/error.hpp"
#include "safeplan/identifier.hpp"
#include "safeplan/pddl.hpp"
#include "sexpr.hpp"

namespace safeplan {

using detail::fail;
using detail::SExpr;

namespace {

const std::set<std::string> kUnsupportedConditionHeads = {"or", "exists", "forall", "imply"};

struct TypedName {
  const SExpr* name;
  const SExpr* type;  // nullptr => object
};

std::vector<TypedName> typed_list(const std::vector<SExpr>& items, std::size_t begin) {
  std::vector<TypedName> out;
  std::vector<const SExpr*> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const auto& item = items[i];
    if (item.is_list) {
      if (item.head() == "either") {
        fail(ErrorCode::UnsupportedConstruct, "'either' types are not supported", item.span);
      }
      fail(ErrorCode::SyntaxError, "expected a name in typed list", item.span);
    }
    if (item.text == "-") {
      if (i + 1 >= items.size()) fail(ErrorCode::SyntaxError, "'-' without a type", item.span);
      const auto& type = items[i + 1];
      if (type.is_list) {
        if (type.head() == "either") {
          fail(ErrorCode::UnsupportedConstruct, "'either' types are not supported", type.span);
        }
        fail(ErrorCode::SyntaxError, "expected a type name after '-'", type.span);
      }
      if (pending.empty()) fail(ErrorCode::SyntaxError, "'-' with nothing to type", item.span);
      for (const auto* p : pending) out.push_back({p, &type});
      pending.clear();
      ++i;
    } else {
      pending.push_back(&item);
    }
  }
  for (const auto* p : pending) out.push_back({p, nullptr});
  return out;
}

void require_identifier(const SExpr& e, const char* what) {
  std::string_view t = e.text;
  if (!t.empty() && t.front() == '?') t.remove_prefix(1);
  if (e.is_list || !is_identifier(t)) {
    fail(ErrorCode::SyntaxError, std::string("expected ") + what, e.span);
  }
}

std::optional<std::int64_t> parse_integer(const std::string& text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

bool looks_numeric(const std::string& text) {
  return !text.empty() && (std::isdigit(static_cast<unsigned char>(text.front())) ||
                           ((text.front() == '-' || text.front() == '+' || text.front() == '.') &&
                            text.size() > 1));
}

SymbolId resolve_type(const Domain& domain, const SExpr* type) {
  if (!type) return 0;
  auto id = domain.find_type(type->text);
  if (!id) fail(ErrorCode::UnknownSymbol, "unknown type '" + type->text + "'", type->span);
  return *id;
}

std::vector<Parameter> parse_parameters(const Domain& domain, const SExpr& list) {
  if (!list.is_list) fail(ErrorCode::SyntaxError, "expected a parameter list", list.span);
  std::vector<Parameter> params;
  for (const auto& tn : typed_list(list.items, 0)) {
    if (tn.name->text.empty() || tn.name->text.front() != '?') {
      fail(ErrorCode::SyntaxError, "parameters must start with '?'", tn.name->span);
    }
    require_identifier(*tn.name, "a parameter name");
    std::string name = canonical_identifier(tn.name->text.substr(1));
    for (const auto& p : params) {
      if (p.name == name) fail(ErrorCode::DuplicateSymbol, "duplicate parameter ?" + name, tn.name->span);
    }
    params.push_back(Parameter{name, resolve_type(domain, tn.type)});
  }
  return params;
}

/// Resolves terms and conditions within a scope of parameters.
class ExpressionParser {
 public:
  ExpressionParser(const Domain& domain, const std::vector<Parameter>& params)
      : domain_(domain), params_(params) {}

  Term term(const SExpr& e, SymbolId expected_type) const {
    if (e.is_list) fail(ErrorCode::SyntaxError, "expected a term", e.span);
    if (!e.text.empty() && e.text.front() == '?') {
      std::string name = canonical_identifier(e.text.substr(1));
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name == name) return Term::parameter(static_cast<SymbolId>(i));
      }
      fail(ErrorCode::UnknownSymbol, "unbound variable " + e.text, e.span);
    }
    auto obj = domain_.find_object(e.text);
    if (!obj) fail(ErrorCode::UnknownSymbol, "unknown object '" + e.text + "'", e.span);
    if (!domain_.is_subtype(domain_.objects()[*obj].type, expected_type)) {
      fail(ErrorCode::TypeMismatch,
           "object '" + e.text + "' is not of type " + domain_.types()[expected_type].name, e.span);
    }
    return Term::object(*obj);
  }

  Atom atom(const SExpr& e, bool fluent) const {
    if (!e.is_list || e.items.empty() || e.items.front().is_list) {
      fail(ErrorCode::SyntaxError, fluent ? "expected a fluent term" : "expected an atom", e.span);
    }
    const auto& name = e.items.front();
    if (canonical_identifier(name.text) == kDangerFluent) {
      fail(ErrorCode::UnknownSymbol, "'danger' cannot be referenced by bundle authors", name.span);
    }
    auto id = fluent ? domain_.find_fluent(name.text) : domain_.find_predicate(name.text);
    if (!id) {
      bool other = fluent ? domain_.find_predicate(name.text).has_value()
                          : domain_.find_fluent(name.text).has_value();
      fail(other ? ErrorCode::TypeMismatch : ErrorCode::UnknownSymbol,
           std::string(other ? (fluent ? "predicate used as numeric fluent: '"
                                       : "numeric fluent used as predicate: '")
                             : (fluent ? "unknown numeric fluent '" : "unknown predicate '")) +
               name.text + "'",
           name.span);
    }
    const auto& decl = fluent ? domain_.fluents()[*id] : domain_.predicates()[*id];
    if (e.items.size() - 1 != decl.params.size()) {
      fail(ErrorCode::ArityMismatch,
           "'" + decl.name + "' expects " + std::to_string(decl.params.size()) + " argument(s)",
           e.span);
    }
    Atom out{*id, {}};
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      out.args.push_back(term(e.items[i], decl.params[i - 1].type));
    }
    return out;
  }

  void condition(const SExpr& e, Condition& out) const {
    if (!e.is_list) fail(ErrorCode::SyntaxError, "expected a condition", e.span);
    if (e.items.empty()) return;  // "()" is the empty conjunction
    std::string head = e.head();
    if (head == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) condition(e.items[i], out);
      return;
    }
    if (kUnsupportedConditionHeads.count(head)) {
      fail(ErrorCode::UnsupportedConstruct,
           "'" + head + "' is not supported; conditions must be conjunctions", e.span);
    }
    if (head == "not") {
      if (e.items.size() != 2) fail(ErrorCode::SyntaxError, "'not' takes one argument", e.span);
      const auto& inner = e.items[1];
      std::string inner_head = inner.head();
      if (inner_head == "and" || inner_head == "not" || kUnsupportedConditionHeads.count(inner_head)) {
        fail(ErrorCode::UnsupportedConstruct, "negation applies to atoms only", inner.span);
      }
      if (is_comparison(inner_head)) {
        fail(ErrorCode::UnsupportedConstruct, "negated comparisons are not supported", inner.span);
      }
      out.conjuncts.push_back(Literal{atom(inner, false), true});
      return;
    }
    if (is_comparison(head)) {
      out.conjuncts.push_back(comparison(e));
      return;
    }
    out.conjuncts.push_back(Literal{atom(e, false), false});
  }

  static bool is_comparison(const std::string& head) {
    return head == "<" || head == "<=" || head == "=" || head == ">=" || head == ">";
  }

  NumericComparison comparison(const SExpr& e) const {
    if (e.items.size() != 3) fail(ErrorCode::SyntaxError, "comparison takes two operands", e.span);
    const auto& lhs = e.items[1];
    const auto& rhs = e.items[2];
    if (!lhs.is_list) {
      fail(ErrorCode::UnsupportedConstruct,
           "comparison must have a numeric fluent on the left (equality between terms is not supported)",
           lhs.span);
    }
    if (rhs.is_list || !looks_numeric(rhs.text)) {
      fail(ErrorCode::UnsupportedConstruct, "comparison must have an integer constant on the right",
           rhs.span);
    }
    auto value = parse_integer(rhs.text);
    if (!value) fail(ErrorCode::UnsupportedConstruct, "only integer constants are supported", rhs.span);
    static const std::map<std::string, Comparator> ops = {{"<", Comparator::Less},
                                                          {"<=", Comparator::LessEq},
                                                          {"=", Comparator::Equal},
                                                          {">=", Comparator::GreaterEq},
                                                          {">", Comparator::Greater}};
    return NumericComparison{atom(lhs, true), ops.at(e.head()), *value};
  }

  void simple_effect(const SExpr& e, std::vector<SimpleEffect>& out) const {
    std::string head = e.head();
    if (head == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) simple_effect(e.items[i], out);
      return;
    }
    if (head == "when") {
      fail(ErrorCode::UnsupportedConstruct, "conditional effects may not be nested", e.span);
    }
    if (head == "forall") {
      fail(ErrorCode::UnsupportedConstruct, "quantified effects are not supported", e.span);
    }
    if (head == "not") {
      if (e.items.size() != 2) fail(ErrorCode::SyntaxError, "'not' takes one argument", e.span);
      out.push_back(AtomEffect{atom(e.items[1], false), false});
      return;
    }
    if (head == "assign" || head == "increase" || head == "decrease") {
      if (e.items.size() != 3) fail(ErrorCode::SyntaxError, head + " takes two operands", e.span);
      const auto& rhs = e.items[2];
      if (rhs.is_list || !looks_numeric(rhs.text)) {
        fail(ErrorCode::UnsupportedConstruct, "numeric effects take an integer constant", rhs.span);
      }
      auto value = parse_integer(rhs.text);
      if (!value) fail(ErrorCode::UnsupportedConstruct, "only integer constants are supported", rhs.span);
      NumericOp op = head == "assign" ? NumericOp::Assign
                     : head == "increase" ? NumericOp::Increase
                                          : NumericOp::Decrease;
      out.push_back(NumericEffect{atom(e.items[1], true), op, *value});
      return;
    }
    if (head == "scale-up" || head == "scale-down") {
      fail(ErrorCode::UnsupportedConstruct, "'" + head + "' is not supported", e.span);
    }
    out.push_back(AtomEffect{atom(e, false), true});
  }

  void effect(const SExpr& e, std::vector<Effect>& out) const {
    if (!e.is_list) fail(ErrorCode::SyntaxError, "expected an effect", e.span);
    if (e.items.empty()) return;
    std::string head = e.head();
    if (head == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) effect(e.items[i], out);
      return;
    }
    if (head == "when") {
      if (e.items.size() != 3) fail(ErrorCode::SyntaxError, "'when' takes a condition and an effect", e.span);
      ConditionalEffect cond;
      condition(e.items[1], cond.condition);
      simple_effect(e.items[2], cond.effects);
      out.push_back(std::move(cond));
      return;
    }
    std::vector<SimpleEffect> simple;
    simple_effect(e, simple);
    for (auto& s : simple) {
      if (auto* a = std::get_if<AtomEffect>(&s)) {
        out.push_back(std::move(*a));
      } else {
        out.push_back(std::get<NumericEffect>(std::move(s)));
      }
    }
  }

 private:
  const Domain& domain_;
  const std::vector<Parameter>& params_;
};

const SExpr& expect_define(const std::vector<SExpr>& top, const std::string& file, const char* kind) {
  if (top.empty()) fail(ErrorCode::SyntaxError, "empty file", SourceSpan{file, 1, 1, 2});
  if (top.size() > 1) fail(ErrorCode::SyntaxError, "unexpected content after definition", top[1].span);
  const auto& def = top.front();
  if (def.head() != "define" || def.items.size() < 2 || def.items[1].head() != kind ||
      def.items[1].items.size() != 2) {
    fail(ErrorCode::SyntaxError, std::string("expected (define (") + kind + " <name>) ...)", def.span);
  }
  require_identifier(def.items[1].items[1], "a name");
  return def;
}

void declare_types(Domain& domain, const SExpr& section) {
  auto entries = typed_list(section.items, 1);
  // First-mention order, then parents before children.
  std::vector<std::string> order;
  std::map<std::string, std::string> parent_of;
  std::map<std::string, const SExpr*> where;
  auto mention = [&](const SExpr& e) {
    std::string name = canonical_identifier(e.text);
    if (!where.count(name)) {
      order.push_back(name);
      where[name] = &e;
    }
    return name;
  };
  for (const auto& tn : entries) {
    require_identifier(*tn.name, "a type name");
    std::string name = mention(*tn.name);
    std::string parent = std::string(kRootType);
    if (tn.type) {
      require_identifier(*tn.type, "a type name");
      parent = mention(*tn.type);
    }
    if (name == kRootType) {
      if (parent != kRootType) fail(ErrorCode::TypeCycle, "'object' cannot have a parent", tn.name->span);
      continue;
    }
    auto it = parent_of.find(name);
    if (it != parent_of.end() && it->second != parent) {
      fail(ErrorCode::DuplicateSymbol, "type '" + name + "' declared with two parents", tn.name->span);
    }
    if (it != parent_of.end()) {
      fail(ErrorCode::DuplicateSymbol, "type '" + name + "' declared twice", tn.name->span);
    }
    parent_of[name] = parent;
  }
  std::map<std::string, int> mark;  // 1 = visiting, 2 = done
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    if (name == kRootType || mark[name] == 2) return;
    if (mark[name] == 1) fail(ErrorCode::TypeCycle, "type hierarchy contains a cycle through '" + name + "'", where[name]->span);
    mark[name] = 1;
    auto it = parent_of.find(name);
    std::string parent = it == parent_of.end() ? std::string(kRootType) : it->second;
    visit(parent);
    if (domain.find_type(name)) {
      fail(ErrorCode::DuplicateSymbol, "type '" + name + "' declared twice", where[name]->span);
    }
    domain.add_type(name, domain.find_type(parent).value());
    mark[name] = 2;
  };
  for (const auto& name : order) visit(name);
}

std::vector<Parameter> parse_signature(const Domain& domain, const SExpr& decl) {
  std::vector<Parameter> params;
  for (const auto& tn : typed_list(decl.items, 1)) {
    if (tn.name->text.empty() || tn.name->text.front() != '?') {
      fail(ErrorCode::SyntaxError, "parameters must start with '?'", tn.name->span);
    }
    require_identifier(*tn.name, "a parameter name");
    params.push_back(Parameter{canonical_identifier(tn.name->text.substr(1)), resolve_type(domain, tn.type)});
  }
  return params;
}

void declare_symbols(Domain& domain, const SExpr& section, bool numeric) {
  for (std::size_t i = 1; i < section.items.size(); ++i) {
    const auto& decl = section.items[i];
    if (!decl.is_list) {
      // `- number` return-type annotations in :functions
      if (numeric && decl.text == "-" && i + 1 < section.items.size() &&
          !section.items[i + 1].is_list) {
        std::string t = section.items[i + 1].lower();
        if (t != "number" && t != "int" && t != "integer") {
          fail(ErrorCode::UnsupportedConstruct, "numeric fluents must be integer-valued",
               section.items[i + 1].span);
        }
        ++i;
        continue;
      }
      fail(ErrorCode::SyntaxError, "expected a declaration list", decl.span);
    }
    if (decl.items.empty() || decl.items.front().is_list) {
      fail(ErrorCode::SyntaxError, "expected a symbol name", decl.span);
    }
    require_identifier(decl.items.front(), "a symbol name");
    try {
      if (numeric) {
        domain.add_fluent(decl.items.front().text, parse_signature(domain, decl));
      } else {
        domain.add_predicate(decl.items.front().text, parse_signature(domain, decl));
      }
    } catch (const Error& err) {
      if (err.span()) throw;
      fail(err.code(), err.what(), decl.items.front().span);
    }
  }
}

void declare_objects(Domain& domain, const SExpr& section, bool constant) {
  for (const auto& tn : typed_list(section.items, 1)) {
    require_identifier(*tn.name, "an object name");
    if (canonical_identifier(tn.name->text) == kDangerFluent) {
      fail(ErrorCode::ReservedFluentDeclared, "'danger' is reserved", tn.name->span);
    }
    try {
      domain.add_object(tn.name->text, resolve_type(domain, tn.type), constant);
    } catch (const Error& err) {
      if (err.span()) throw;
      fail(err.code(), err.what(), tn.name->span);
    }
  }
}

void declare_action(Domain& domain, const SExpr& section) {
  if (section.items.size() < 2 || section.items[1].is_list) {
    fail(ErrorCode::SyntaxError, "expected an action name", section.span);
  }
  require_identifier(section.items[1], "an action name");
  ActionSchema schema;
  schema.name = canonical_identifier(section.items[1].text);
  const SExpr* params = nullptr;
  const SExpr* pre = nullptr;
  const SExpr* eff = nullptr;
  for (std::size_t i = 2; i < section.items.size(); i += 2) {
    const auto& key = section.items[i];
    if (i + 1 >= section.items.size()) fail(ErrorCode::SyntaxError, "missing value", key.span);
    std::string k = key.lower();
    if (k == ":parameters") {
      params = &section.items[i + 1];
    } else if (k == ":precondition") {
      pre = &section.items[i + 1];
    } else if (k == ":effect") {
      eff = &section.items[i + 1];
    } else {
      fail(ErrorCode::UnsupportedConstruct, "unsupported action field '" + key.text + "'", key.span);
    }
  }
  if (params) schema.params = parse_parameters(domain, *params);
  ExpressionParser expr(domain, schema.params);
  if (pre) expr.condition(*pre, schema.precondition);
  if (eff) expr.effect(*eff, schema.effects);
  try {
    domain.add_action(std::move(schema));
  } catch (const Error& err) {
    fail(err.code(), err.what(), section.items[1].span);
  }
}

} // namespace

std::shared_ptr<Domain> parse_domain_pddl(std::string_view text, const std::string& file) {
  auto top = detail::parse_sexprs(text, file);
  const auto& def = expect_define(top, file, "domain");
  auto domain = std::make_shared<Domain>();
  domain->name = canonical_identifier(def.items[1].items[1].text);

  std::vector<const SExpr*> actions;
  for (std::size_t i = 2; i < def.items.size(); ++i) {
    const auto& section = def.items[i];
    std::string head = section.head();
    if (head == ":requirements") {
      continue;
    } else if (head == ":types") {
      declare_types(*domain, section);
    } else if (head == ":constants") {
      declare_objects(*domain, section, true);
    } else if (head == ":predicates") {
      declare_symbols(*domain, section, false);
    } else if (head == ":functions") {
      declare_symbols(*domain, section, true);
    } else if (head == ":action") {
      actions.push_back(&section);
    } else if (head == ":derived" || head == ":durative-action" || head == ":axiom" ||
               head == ":process" || head == ":event" || head == ":constraints") {
      fail(ErrorCode::UnsupportedConstruct, "'" + head + "' is not supported", section.span);
    } else {
      fail(ErrorCode::SyntaxError, "unexpected domain section", section.span);
    }
  }
  for (const auto* a : actions) declare_action(*domain, *a);
  return domain;
}

BasicProblem parse_problem_pddl(std::string_view text, const Domain& domain, const std::string& file) {
  auto top = detail::parse_sexprs(text, file);
  const auto& def = expect_define(top, file, "problem");
  auto extended = std::make_shared<Domain>(domain);
  BasicProblem problem;
  problem.name = canonical_identifier(def.items[1].items[1].text);

  const SExpr* init = nullptr;
  const SExpr* goal = nullptr;
  for (std::size_t i = 2; i < def.items.size(); ++i) {
    const auto& section = def.items[i];
    std::string head = section.head();
    if (head == ":domain") {
      if (section.items.size() != 2) fail(ErrorCode::SyntaxError, "expected (:domain <name>)", section.span);
      if (canonical_identifier(section.items[1].text) != domain.name) {
        fail(ErrorCode::UnknownSymbol, "problem refers to domain '" + section.items[1].text + "'",
             section.items[1].span);
      }
    } else if (head == ":requirements") {
      continue;
    } else if (head == ":objects") {
      declare_objects(*extended, section, false);
    } else if (head == ":init") {
      init = &section;
    } else if (head == ":goal") {
      goal = &section;
    } else if (head == ":metric" || head == ":constraints") {
      fail(ErrorCode::UnsupportedConstruct, "'" + head + "' is not supported", section.span);
    } else {
      fail(ErrorCode::SyntaxError, "unexpected problem section", section.span);
    }
  }
  if (!goal) fail(ErrorCode::SyntaxError, "problem has no :goal", def.span);

  static const std::vector<Parameter> kNoParams;
  ExpressionParser expr(*extended, kNoParams);
  if (init) {
    for (std::size_t i = 1; i < init->items.size(); ++i) {
      const auto& fact = init->items[i];
      std::string head = fact.head();
      if (head == "=") {
        if (fact.items.size() != 3 || !fact.items[1].is_list || fact.items[2].is_list) {
          fail(ErrorCode::SyntaxError, "expected (= (fluent ...) <integer>)", fact.span);
        }
        auto value = parse_integer(fact.items[2].text);
        if (!value) fail(ErrorCode::UnsupportedConstruct, "only integer values are supported", fact.items[2].span);
        auto atom = expr.atom(fact.items[1], true);
        problem.init.set_value(substitute(atom, {}), *value);
      } else if (head == "not") {
        fail(ErrorCode::UnsupportedConstruct, "negative initial facts are implicit", fact.span);
      } else {
        problem.init.add(substitute(expr.atom(fact, false), {}));
      }
    }
  }
  if (goal->items.size() != 2) fail(ErrorCode::SyntaxError, "expected (:goal <condition>)", goal->span);
  expr.condition(goal->items[1], problem.goal);
  problem.domain = std::move(extended);
  return problem;
}

Condition parse_condition_pddl(std::string_view text, const Domain& domain,
                               const std::vector<Parameter>& params, const std::string& file) {
  auto top = detail::parse_sexprs(text, file);
  Condition out;
  if (top.empty()) return out;
  if (top.size() != 1) fail(ErrorCode::SyntaxError, "expected a single condition", top[1].span);
  ExpressionParser(domain, params).condition(top.front(), out);
  return out;
}

} // namespace safeplan
