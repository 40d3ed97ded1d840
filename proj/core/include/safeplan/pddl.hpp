#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "safeplan/domain.hpp"

namespace safeplan {

// Supported PDDL subset: typed STRIPS, negative preconditions, one level of
// conditional effects (`when`), integer numeric fluents with assign/increase/
// decrease and comparisons of a fluent against an integer constant.
// Disjunction, quantifiers, implication, equality between terms, derived
// predicates and durative actions are rejected with UnsupportedConstruct.

/// Parses a `(define (domain ...))` file. Errors carry a SourceSpan.
std::shared_ptr<Domain> parse_domain_pddl(std::string_view text, const std::string& file = "domain.pddl");

/// Parses a `(define (problem ...))` file against `domain`. The returned
/// problem owns a copy of the domain extended with the problem's objects.
BasicProblem parse_problem_pddl(std::string_view text, const Domain& domain,
                                const std::string& file = "problem.pddl");

/// Parses a goal-syntax conjunction. `params` is the variable scope (may be
/// empty for ground conditions).
Condition parse_condition_pddl(std::string_view text, const Domain& domain,
                               const std::vector<Parameter>& params,
                               const std::string& file = "<condition>");

std::string render_domain_pddl(const Domain& domain);
std::string render_problem_pddl(const BasicProblem& problem);
std::string render_condition_pddl(const Domain& domain, const Condition& condition,
                                  const std::vector<Parameter>& params);

} // namespace safeplan
