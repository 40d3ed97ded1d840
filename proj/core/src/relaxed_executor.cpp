#include "safeplan/relaxed_executor.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace safeplan {

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::UnknownAction: return "unknown_action";
    case SkipReason::Malformed: return "malformed";
    case SkipReason::Contradiction: return "contradiction";
    case SkipReason::NumericOverflow: return "numeric_overflow";
  }
  return "malformed";
}

namespace {

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

struct Interval {
  std::int64_t lo = kMin;
  std::int64_t hi = kMax;
  bool empty = false;

  void restrict(Comparator op, std::int64_t k) {
    switch (op) {
      case Comparator::Less:
        if (k == kMin) empty = true; else hi = std::min(hi, k - 1);
        break;
      case Comparator::LessEq: hi = std::min(hi, k); break;
      case Comparator::Equal:
        lo = std::max(lo, k);
        hi = std::min(hi, k);
        break;
      case Comparator::GreaterEq: lo = std::max(lo, k); break;
      case Comparator::Greater:
        if (k == kMax) empty = true; else lo = std::max(lo, k + 1);
        break;
    }
    if (lo > hi) empty = true;
  }
};

bool contradictory(const Condition& pre, const std::vector<SymbolId>& args) {
  std::set<GroundAtom> positive, negative;
  std::map<GroundAtom, Interval> ranges;
  for (const auto& c : pre.conjuncts) {
    if (const auto* lit = std::get_if<Literal>(&c)) {
      auto g = substitute(lit->atom, args);
      (lit->negated ? negative : positive).insert(g);
    } else {
      const auto& cmp = std::get<NumericComparison>(c);
      auto& r = ranges[substitute(cmp.fluent, args)];
      r.restrict(cmp.op, cmp.value);
      if (r.empty) return true;
    }
  }
  for (const auto& g : positive) {
    if (negative.count(g)) return true;
  }
  return false;
}

std::int64_t nearest_satisfying(Comparator op, std::int64_t k) {
  switch (op) {
    case Comparator::Less: return k - 1;
    case Comparator::Greater: return k + 1;
    default: return k;
  }
}

} // namespace

RelaxedResult relaxed_run(const Plan& plan, const AugmentedProblem& problem) {
  const Domain& domain = *problem.domain;
  RelaxedResult result;
  auto& trace = result.trace;
  trace.states.push_back(problem.initial_state());

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    RelaxedStep record;
    const State& current = trace.states.back();

    if (step.status != StepStatus::Resolved || !step.action || step.action->schema >= domain.actions().size()) {
      record.skipped = step.status == StepStatus::UnknownAction ? SkipReason::UnknownAction : SkipReason::Malformed;
      trace.steps.push_back(std::move(record));
      trace.states.push_back(current);
      continue;
    }
    const auto& action = *step.action;
    const auto& schema = domain.actions()[action.schema];
    if (contradictory(schema.precondition, action.args)) {
      record.skipped = SkipReason::Contradiction;
      trace.steps.push_back(std::move(record));
      trace.states.push_back(current);
      continue;
    }

    State forced = current;
    for (const auto& c : schema.precondition.conjuncts) {
      if (satisfied(forced, c, action.args)) continue;
      record.forced_conjuncts.push_back(format_conjunct(domain, c, action.args));
      if (const auto* lit = std::get_if<Literal>(&c)) {
        auto g = substitute(lit->atom, action.args);
        if (lit->negated) forced.remove(g); else forced.add(g);
      } else {
        const auto& cmp = std::get<NumericComparison>(c);
        forced.set_value(substitute(cmp.fluent, action.args), nearest_satisfying(cmp.op, cmp.value));
      }
    }

    auto outcome = try_step(forced, action, domain);
    if (!outcome.state) {
      // Only overflow can fail here: the precondition was just established.
      record.skipped = SkipReason::NumericOverflow;
      record.forced_conjuncts.clear();
      trace.steps.push_back(std::move(record));
      trace.states.push_back(current);
      continue;
    }
    record.executed = true;
    for (auto& e : outcome.events) {
      e.step = i + 1;
      record.danger_delta += e.delta;
      trace.danger_events.push_back(e);
    }
    trace.steps.push_back(std::move(record));
    trace.states.push_back(std::move(*outcome.state));
  }
  trace.terminal_danger = trace.states.back().danger.value_or(0);
  result.si = trace.terminal_danger <= problem.d_max;
  return result;
}

RelaxedResult relaxed_run(const Plan& plan, const TaskBundle& bundle) {
  return relaxed_run(plan, bundle.augmented);
}

} // namespace safeplan
