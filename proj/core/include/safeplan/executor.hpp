#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "safeplan/bundle.hpp"
#include "safeplan/domain.hpp"
#include "safeplan/plan.hpp"

namespace safeplan {

struct DangerEvent {
  std::size_t step = 0;  // 1-based plan step index
  std::size_t rule = 0;  // index into AugmentedProblem::rules
  std::int64_t delta = 0;
  bool operator==(const DangerEvent&) const = default;
};

enum class FailureKind {
  UnknownAction,
  Malformed,
  PreconditionViolated,
  NumericOverflow,
  GoalUnmet,
};
std::string_view to_string(FailureKind kind);

struct FailureReason {
  FailureKind kind = FailureKind::GoalUnmet;
  std::optional<std::size_t> step;  // 1-based; empty for GoalUnmet
  std::vector<std::string> unsatisfied;  // violated conjuncts, formatted
  std::string detail;
  bool operator==(const FailureReason&) const = default;
};

/// Outcome of applying one ground action.
struct StepOutcome {
  std::optional<State> state;  // set on success
  std::vector<DangerEvent> events;
  std::optional<FailureReason> failure;
};

/// The transition model: successor of `state` under `action`, or the reason it
/// is undefined. Conditional effects fire iff their condition holds in the
/// pre-state; deletes are applied before adds, numeric effects left to right,
/// then danger increments. Danger effects only fire when state.danger is set.
StepOutcome try_step(const State& state, const GroundAction& action, const Domain& domain);

/// Throwing form. Errors: PreconditionViolated, NumericOverflow, UnknownSchema.
State step(const State& state, const GroundAction& action, const BasicProblem& problem);
State step(const State& state, const GroundAction& action, const AugmentedProblem& problem);

struct Trace {
  std::vector<State> states;  // s_0 .. s_k for the k executed steps
  std::vector<DangerEvent> danger_events;
  std::optional<FailureReason> halt;
};

struct Infeasible {
  FailureReason reason;
  bool operator==(const Infeasible&) const = default;
};
struct FeasibleUnsafe {
  std::vector<DangerEvent> events;
  std::int64_t terminal_danger = 0;
  bool operator==(const FeasibleUnsafe&) const = default;
};
struct Safe {
  std::int64_t terminal_danger = 0;
  bool operator==(const Safe&) const = default;
};

using Verdict = std::variant<Infeasible, FeasibleUnsafe, Safe>;

enum class VerdictKind { Infeasible, FeasibleUnsafe, Safe };
VerdictKind kind_of(const Verdict& verdict);
std::string_view to_string(VerdictKind kind);

struct RunResult {
  Trace trace;
  bool feasible = false;
  bool safe = false;
  Verdict verdict;
};

/// Executes the plan against the augmented problem from (s_init, d_init).
/// Any unresolved step or inapplicable action halts with Infeasible at that
/// step; otherwise the goal is checked at the final state only, and the plan
/// is Safe iff the terminal danger is at most d_max.
RunResult run_plan(const Plan& plan, const TaskBundle& bundle);
RunResult run_plan(const Plan& plan, const AugmentedProblem& problem);

/// Feasibility on the basic problem alone (no danger counter).
struct BasicRun {
  Trace trace;
  bool feasible = false;
};
BasicRun run_basic(const Plan& plan, const BasicProblem& problem);

/// Unsatisfied conjuncts of the goal, formatted.
std::vector<std::string> unmet_goal(const State& state, const BasicProblem& problem);

} // namespace safeplan
