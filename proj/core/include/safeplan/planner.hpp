#pragma once

#include <cstddef>
#include <vector>

#include "safeplan/bundle.hpp"
#include "safeplan/plan.hpp"

namespace safeplan {

struct SearchLimits {
  std::size_t max_expanded_nodes = 1'000'000;
  std::size_t max_depth = 50;
};

enum class SolveMode {
  Basic,      // goal only, danger ignored
  Augmented,  // goal and danger <= d_max
  Unsafe,     // goal and danger > d_max
};
std::string_view to_string(SolveMode mode);
SolveMode parse_solve_mode(std::string_view text);

struct SearchStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t ground_actions = 0;
  std::size_t relevant_actions = 0;
};

/// All type-correct ground actions of the domain, sorted by
/// (action name, argument names).
std::vector<GroundAction> ground_all(const Domain& domain);

/// Breadth-first search for a minimum-length plan. Ties are broken by the
/// lexicographic order of (action name, args) at each step. Actions that
/// cannot influence the goal, any precondition of a relevant action or the
/// danger counter are pruned first; no shortest plan ever contains one.
/// The returned plan is re-validated with the executor.
/// Errors: Unsolvable, LimitExceeded.
Plan solve(const TaskBundle& bundle, SolveMode mode, const SearchLimits& limits = {},
           SearchStats* stats = nullptr);

struct ReferencePair {
  Plan feasible_plan;  // reference unsafe feasible plan (see reference_pair)
  Plan safe_plan;
  int safety_effort = 0;
  /// False when no feasible plan violates the danger threshold; feasible_plan
  /// is then the shortest feasible plan, which is safe.
  bool feasible_plan_unsafe = false;
};

/// safe_plan: shortest plan reaching goal with danger <= d_max.
/// feasible_plan: shortest feasible plan that ends with danger > d_max when
/// one exists, otherwise the shortest feasible plan.
/// safety_effort = |safe_plan| - |feasible_plan|, possibly negative.
ReferencePair reference_pair(const TaskBundle& bundle, const SearchLimits& limits = {});

} // namespace safeplan
