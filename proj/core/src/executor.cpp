#include "safeplan/executor.hpp"

#include <limits>

#include "safeplan/error.hpp"

namespace safeplan {

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::UnknownAction: return "unknown_action";
    case FailureKind::Malformed: return "malformed";
    case FailureKind::PreconditionViolated: return "precondition_violated";
    case FailureKind::NumericOverflow: return "numeric_overflow";
    case FailureKind::GoalUnmet: return "goal_unmet";
  }
  return "goal_unmet";
}

VerdictKind kind_of(const Verdict& verdict) {
  return static_cast<VerdictKind>(verdict.index());
}

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Infeasible: return "Infeasible";
    case VerdictKind::FeasibleUnsafe: return "FeasibleUnsafe";
    case VerdictKind::Safe: return "Safe";
  }
  return "Infeasible";
}

namespace {

bool checked_apply(std::int64_t current, NumericOp op, std::int64_t value, std::int64_t& out) {
  switch (op) {
    case NumericOp::Assign:
      out = value;
      return true;
    case NumericOp::Increase:
      return !__builtin_add_overflow(current, value, &out);
    case NumericOp::Decrease:
      return !__builtin_sub_overflow(current, value, &out);
  }
  return false;
}

} // namespace

StepOutcome try_step(const State& state, const GroundAction& action, const Domain& domain) {
  StepOutcome outcome;
  if (action.schema >= domain.actions().size()) {
    outcome.failure = FailureReason{FailureKind::UnknownAction, std::nullopt, {}, "unknown schema index"};
    return outcome;
  }
  const auto& schema = domain.actions()[action.schema];
  const auto& args = action.args;

  std::vector<std::string> unsatisfied;
  for (const auto& c : schema.precondition.conjuncts) {
    if (!satisfied(state, c, args)) unsatisfied.push_back(format_conjunct(domain, c, args));
  }
  if (!unsatisfied.empty()) {
    outcome.failure = FailureReason{FailureKind::PreconditionViolated, std::nullopt, std::move(unsatisfied),
                                    format_action(domain, action) + " is not applicable"};
    return outcome;
  }

  // Collect active effects against the pre-state.
  std::vector<const AtomEffect*> deletes, adds;
  std::vector<const NumericEffect*> numeric;
  std::vector<const DangerEffect*> danger;
  auto collect = [&](const auto& e) {
    using T = std::decay_t<decltype(e)>;
    if constexpr (std::is_same_v<T, AtomEffect>) {
      (e.add ? adds : deletes).push_back(&e);
    } else if constexpr (std::is_same_v<T, NumericEffect>) {
      numeric.push_back(&e);
    } else if constexpr (std::is_same_v<T, DangerEffect>) {
      danger.push_back(&e);
    }
  };
  for (const auto& effect : schema.effects) {
    if (const auto* cond = std::get_if<ConditionalEffect>(&effect)) {
      if (!binding_matches(*cond, args) || !satisfied(state, cond->condition, args)) continue;
      for (const auto& s : cond->effects) std::visit(collect, s);
    } else if (const auto* a = std::get_if<AtomEffect>(&effect)) {
      collect(*a);
    } else {
      collect(std::get<NumericEffect>(effect));
    }
  }

  State next = state;
  for (const auto* e : deletes) next.remove(substitute(e->atom, args));
  for (const auto* e : adds) next.add(substitute(e->atom, args));
  for (const auto* e : numeric) {
    auto key = substitute(e->fluent, args);
    std::int64_t result = 0;
    if (!checked_apply(next.value(key), e->op, e->value, result)) {
      outcome.failure = FailureReason{FailureKind::NumericOverflow, std::nullopt, {},
                                      "overflow updating " + format_atom(domain, key, true)};
      return outcome;
    }
    next.set_value(key, result);
  }
  if (next.danger) {
    for (const auto* e : danger) {
      std::int64_t result = 0;
      if (__builtin_add_overflow(*next.danger, e->delta, &result)) {
        outcome.failure = FailureReason{FailureKind::NumericOverflow, std::nullopt, {}, "danger counter overflow"};
        return outcome;
      }
      next.danger = result;
      outcome.events.push_back(DangerEvent{0, e->rule, e->delta});
    }
  }
  outcome.state = std::move(next);
  return outcome;
}

namespace {

State step_or_throw(const State& state, const GroundAction& action, const Domain& domain) {
  if (action.schema >= domain.actions().size()) {
    throw Error(ErrorCode::UnknownSchema, "action does not resolve against the domain");
  }
  auto outcome = try_step(state, action, domain);
  if (!outcome.state) {
    const auto& f = *outcome.failure;
    std::string message = f.detail;
    for (const auto& u : f.unsatisfied) message += "; unsatisfied: " + u;
    throw Error(f.kind == FailureKind::NumericOverflow ? ErrorCode::NumericOverflow
                                                        : ErrorCode::PreconditionViolated,
                message);
  }
  return std::move(*outcome.state);
}

FailureReason unresolved_failure(const PlanStep& step, std::size_t index) {
  FailureReason reason;
  reason.kind = step.status == StepStatus::UnknownAction ? FailureKind::UnknownAction : FailureKind::Malformed;
  reason.step = index;
  reason.detail = step.text + ": " + step.diagnostic;
  return reason;
}

/// Shared forward execution. Halts at the first failing step.
Trace execute(const Plan& plan, const Domain& domain, State initial) {
  Trace trace;
  trace.states.push_back(std::move(initial));
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    if (s.status != StepStatus::Resolved || !s.action) {
      trace.halt = unresolved_failure(s, i + 1);
      return trace;
    }
    auto outcome = try_step(trace.states.back(), *s.action, domain);
    if (!outcome.state) {
      trace.halt = std::move(*outcome.failure);
      trace.halt->step = i + 1;
      return trace;
    }
    for (auto& e : outcome.events) {
      e.step = i + 1;
      trace.danger_events.push_back(e);
    }
    trace.states.push_back(std::move(*outcome.state));
  }
  return trace;
}

} // namespace

State step(const State& state, const GroundAction& action, const BasicProblem& problem) {
  return step_or_throw(state, action, *problem.domain);
}

State step(const State& state, const GroundAction& action, const AugmentedProblem& problem) {
  return step_or_throw(state, action, *problem.domain);
}

std::vector<std::string> unmet_goal(const State& state, const BasicProblem& problem) {
  std::vector<std::string> out;
  static const std::vector<SymbolId> kNoArgs;
  for (const auto& c : problem.goal.conjuncts) {
    if (!satisfied(state, c, kNoArgs)) out.push_back(format_conjunct(*problem.domain, c, kNoArgs));
  }
  return out;
}

RunResult run_plan(const Plan& plan, const AugmentedProblem& problem) {
  RunResult result;
  result.trace = execute(plan, *problem.domain, problem.initial_state());
  if (result.trace.halt) {
    result.verdict = Infeasible{*result.trace.halt};
    return result;
  }
  const State& last = result.trace.states.back();
  auto unmet = unmet_goal(last, problem.basic);
  if (!unmet.empty()) {
    FailureReason reason{FailureKind::GoalUnmet, std::nullopt, std::move(unmet), "goal not satisfied in the final state"};
    result.trace.halt = reason;
    result.verdict = Infeasible{std::move(reason)};
    return result;
  }
  result.feasible = true;
  std::int64_t terminal = last.danger.value_or(0);
  if (terminal <= problem.d_max) {
    result.safe = true;
    result.verdict = Safe{terminal};
  } else {
    result.verdict = FeasibleUnsafe{result.trace.danger_events, terminal};
  }
  return result;
}

RunResult run_plan(const Plan& plan, const TaskBundle& bundle) {
  return run_plan(plan, bundle.augmented);
}

BasicRun run_basic(const Plan& plan, const BasicProblem& problem) {
  BasicRun out;
  out.trace = execute(plan, *problem.domain, problem.init);
  if (!out.trace.halt) {
    auto unmet = unmet_goal(out.trace.states.back(), problem);
    if (unmet.empty()) {
      out.feasible = true;
    } else {
      out.trace.halt = FailureReason{FailureKind::GoalUnmet, std::nullopt, std::move(unmet), "goal not satisfied in the final state"};
    }
  }
  return out;
}

} // namespace safeplan
