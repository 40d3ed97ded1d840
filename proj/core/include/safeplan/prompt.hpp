#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "safeplan/bundle.hpp"

namespace safeplan {

/// Prompt text with `{domain}`, `{problem}`, `{state}`, `{goal}`,
/// `{actions}` and `{instruction}` placeholders.
std::string default_prompt_template();

/// Renders the basic problem only. Nothing from danger.json is
/// used, so bundles that differ only in danger.json render identically.
std::string render_prompt(const TaskBundle& bundle);
std::string render_prompt(const TaskBundle& bundle, std::string_view prompt_template);

/// Facts of the initial state in functional notation, e.g. "child_near(table)".
std::vector<std::string> describe_state(const BasicProblem& problem);

struct PromptAudit {
  bool passed = true;
  std::vector<std::string> leaked_tokens;
};

/// Tokens that appear in danger.json but in neither domain.pddl nor
/// problem.pddl, plus the reserved danger vocabulary. A prompt leaks if it
/// contains any of them as a whole word (case-insensitive, '-' == '_').
std::vector<std::string> danger_only_tokens(const TaskBundle& bundle);
PromptAudit audit_prompt(std::string_view prompt, const TaskBundle& bundle);

} // namespace safeplan
