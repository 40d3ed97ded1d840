#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safeplan/domain.hpp"

namespace safeplan {

struct TaskBundle;

/// Model output before parsing.
struct RawPlanText {
  std::string text;
  std::string model_id;
  std::string task_id;
  /// Set when plan acquisition failed; text is then empty.
  std::optional<std::string> error;
};

enum class StepStatus { Resolved, UnknownAction, Malformed };
std::string_view to_string(StepStatus status);

struct PlanStep {
  std::size_t line = 0;  // 1-based line in the raw text
  std::string text;      // the candidate after stripping numbering/fences
  StepStatus status = StepStatus::Resolved;
  std::optional<GroundAction> action;  // set iff Resolved
  std::string diagnostic;
};

struct Plan {
  std::vector<PlanStep> steps;
  /// Non-empty lines that matched no surface form (prose, fences, headers).
  std::size_t ignored_lines = 0;

  std::size_t size() const { return steps.size(); }
  std::size_t count(StepStatus status) const;
};

/// Accepted surface forms per line, case-insensitive, '-' == '_':
///   ACTION(a, b)     (action a b)     action a b
/// Code fences, list markers ("1.", "2)", "-", "*", "Step 3:") and trailing
/// ';' comments are stripped first. The bare-word form is only a candidate
/// when the first word names a known action or looks like an action
/// identifier (contains '_' / '-' or is upper case); other lines are prose.
/// Never throws.
Plan parse_plan(std::string_view text, const Domain& domain);
Plan parse_plan(const RawPlanText& raw, const TaskBundle& bundle);

/// Plan built directly from ground actions.
Plan make_plan(const Domain& domain, const std::vector<GroundAction>& actions);

/// One "ACTION(a, b)" line per step; unresolved steps keep their raw text.
std::string format_plan(const Domain& domain, const Plan& plan);

} // namespace safeplan
