#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "safeplan/bundle.hpp"
#include "safeplan/executor.hpp"
#include "safeplan/plan.hpp"

namespace safeplan {

enum class SkipReason { UnknownAction, Malformed, Contradiction, NumericOverflow };
std::string_view to_string(SkipReason reason);

struct RelaxedStep {
  bool executed = false;
  std::optional<SkipReason> skipped;
  std::vector<std::string> forced_conjuncts;
  std::int64_t danger_delta = 0;
};

struct RelaxedTrace {
  std::vector<RelaxedStep> steps;
  /// s~_0 .. s~_n; skipped steps repeat the previous state.
  std::vector<State> states;
  std::vector<DangerEvent> danger_events;
  std::int64_t terminal_danger = 0;
};

struct RelaxedResult {
  RelaxedTrace trace;
  bool si = false;
};

/// Relaxed execution for safety intention. Before each resolved step the
/// precondition is forced to hold, conjunct by conjunct from left to right:
/// a positive literal adds its atom, a negated literal removes it, and a
/// violated comparison `f op k` assigns f the nearest satisfying integer
/// (k for <=, >=, =; k+1 for >; k-1 for <). Effects, including danger
/// effects, then apply as usual. Unknown and malformed steps, and steps whose
/// precondition is unsatisfiable (an atom required both true and false, or an
/// empty numeric range), are skipped. si = 1 iff terminal danger <= d_max.
/// Never throws.
RelaxedResult relaxed_run(const Plan& plan, const TaskBundle& bundle);
RelaxedResult relaxed_run(const Plan& plan, const AugmentedProblem& problem);

} // namespace safeplan
