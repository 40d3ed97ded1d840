#include "safeplan/planner.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

#include "safeplan/error.hpp"
#include "safeplan/executor.hpp"
#include "safeplan/identifier.hpp"

namespace safeplan {

std::string_view to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::Basic: return "basic";
    case SolveMode::Augmented: return "augmented";
    case SolveMode::Unsafe: return "unsafe";
  }
  return "basic";
}

SolveMode parse_solve_mode(std::string_view text) {
  auto t = canonical_identifier(text);
  if (t == "basic") return SolveMode::Basic;
  if (t == "augmented") return SolveMode::Augmented;
  if (t == "unsafe") return SolveMode::Unsafe;
  throw Error(ErrorCode::InvalidArgument, "unknown solve mode '" + std::string(text) + "'");
}

std::vector<GroundAction> ground_all(const Domain& domain) {
  std::vector<GroundAction> out;
  for (SymbolId s = 0; s < domain.actions().size(); ++s) {
    const auto& schema = domain.actions()[s];
    std::vector<std::vector<SymbolId>> candidates(schema.params.size());
    for (std::size_t p = 0; p < schema.params.size(); ++p) {
      for (SymbolId o = 0; o < domain.objects().size(); ++o) {
        if (domain.is_subtype(domain.objects()[o].type, schema.params[p].type)) candidates[p].push_back(o);
      }
    }
    std::vector<SymbolId> args(schema.params.size());
    auto rec = [&](auto&& self, std::size_t p) -> void {
      if (p == args.size()) {
        out.push_back(GroundAction{s, args});
        return;
      }
      for (auto o : candidates[p]) {
        args[p] = o;
        self(self, p + 1);
      }
    };
    rec(rec, 0);
  }
  auto key = [&](const GroundAction& a) {
    std::vector<std::string> k{domain.actions()[a.schema].name};
    for (auto o : a.args) k.push_back(domain.objects()[o].name);
    return k;
  };
  std::sort(out.begin(), out.end(), [&](const GroundAction& a, const GroundAction& b) { return key(a) < key(b); });
  return out;
}

namespace {

struct Relevance {
  std::vector<bool> action;
};

template <typename F>
void for_each_condition_symbol(const Condition& c, F&& f) {
  for (const auto& conj : c.conjuncts) {
    if (const auto* lit = std::get_if<Literal>(&conj)) {
      f(false, lit->atom.symbol);
    } else {
      f(true, std::get<NumericComparison>(conj).fluent.symbol);
    }
  }
}

Relevance compute_relevance(const Domain& domain, const Condition& goal, SolveMode mode) {
  std::set<SymbolId> preds, fluents;
  auto mark = [&](bool fluent, SymbolId s) { (fluent ? fluents : preds).insert(s); };
  for_each_condition_symbol(goal, mark);

  auto touches = [&](const auto& e) -> bool {
    using T = std::decay_t<decltype(e)>;
    if constexpr (std::is_same_v<T, AtomEffect>) {
      return preds.count(e.atom.symbol) > 0;
    } else if constexpr (std::is_same_v<T, NumericEffect>) {
      return fluents.count(e.fluent.symbol) > 0;
    } else if constexpr (std::is_same_v<T, DangerEffect>) {
      return mode != SolveMode::Basic;
    } else {
      for (const auto& s : e.effects) {
        if (std::visit([&](const auto& x) {
              using U = std::decay_t<decltype(x)>;
              if constexpr (std::is_same_v<U, AtomEffect>) return preds.count(x.atom.symbol) > 0;
              else if constexpr (std::is_same_v<U, NumericEffect>) return fluents.count(x.fluent.symbol) > 0;
              else return mode != SolveMode::Basic;
            }, s)) {
          return true;
        }
      }
      return false;
    }
  };

  Relevance rel{std::vector<bool>(domain.actions().size(), false)};
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < domain.actions().size(); ++a) {
      if (rel.action[a]) continue;
      const auto& schema = domain.actions()[a];
      bool relevant = false;
      for (const auto& e : schema.effects) {
        if (std::visit(touches, e)) {
          relevant = true;
          break;
        }
      }
      if (!relevant) continue;
      rel.action[a] = true;
      changed = true;
      for_each_condition_symbol(schema.precondition, mark);
      for (const auto& e : schema.effects) {
        if (const auto* cond = std::get_if<ConditionalEffect>(&e)) for_each_condition_symbol(cond->condition, mark);
      }
    }
  }
  return rel;
}

bool all_deltas_nonnegative(const AugmentedProblem& problem) {
  return std::all_of(problem.rules.begin(), problem.rules.end(), [](const DangerRule& r) { return r.delta >= 0; });
}

struct Node {
  State state;
  std::int64_t parent;
  std::uint32_t action;
  std::uint32_t depth;
};

} // namespace

Plan solve(const TaskBundle& bundle, SolveMode mode, const SearchLimits& limits, SearchStats* stats) {
  const auto& problem = bundle.augmented;
  const Domain& domain = mode == SolveMode::Basic ? *problem.basic.domain : *problem.domain;
  static const std::vector<SymbolId> kNoArgs;

  auto all = ground_all(domain);
  auto relevance = compute_relevance(domain, problem.basic.goal, mode);
  std::vector<GroundAction> actions;
  for (const auto& a : all) {
    if (relevance.action[a.schema]) actions.push_back(a);
  }
  SearchStats local;
  local.ground_actions = all.size();
  local.relevant_actions = actions.size();

  const bool prune_danger = mode == SolveMode::Augmented && all_deltas_nonnegative(problem);
  const bool saturate_danger = mode == SolveMode::Unsafe && all_deltas_nonnegative(problem);
  auto is_goal = [&](const State& s) {
    if (!satisfied(s, problem.basic.goal, kNoArgs)) return false;
    if (mode == SolveMode::Basic) return true;
    std::int64_t d = s.danger.value_or(0);
    return mode == SolveMode::Augmented ? d <= problem.d_max : d > problem.d_max;
  };

  std::vector<Node> nodes;
  auto hash = [&nodes](std::size_t i) { return nodes[i].state.hash(); };
  auto equal = [&nodes](std::size_t a, std::size_t b) { return nodes[a].state == nodes[b].state; };
  std::unordered_set<std::size_t, decltype(hash), decltype(equal)> visited(1024, hash, equal);

  State init = mode == SolveMode::Basic ? problem.basic.init : problem.initial_state();
  nodes.push_back(Node{std::move(init), -1, 0, 0});
  visited.insert(0);

  auto finish = [&](std::size_t goal_node) {
    std::vector<GroundAction> path;
    for (std::int64_t i = static_cast<std::int64_t>(goal_node); nodes[i].parent >= 0; i = nodes[i].parent) {
      path.push_back(actions[nodes[i].action]);
    }
    std::reverse(path.begin(), path.end());
    Plan plan = make_plan(*problem.domain, path);

    bool ok = false;
    if (mode == SolveMode::Basic) {
      ok = run_basic(plan, problem.basic).feasible;
    } else {
      auto run = run_plan(plan, problem);
      ok = mode == SolveMode::Augmented ? run.safe : (run.feasible && !run.safe);
    }
    if (!ok) throw Error(ErrorCode::Internal, "search result failed re-validation");
    if (stats) *stats = local;
    return plan;
  };

  if (is_goal(nodes[0].state)) return finish(0);

  bool depth_cut = false;
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t current = frontier.front();
    frontier.pop_front();
    if (nodes[current].depth >= limits.max_depth) {
      depth_cut = true;
      continue;
    }
    if (++local.expanded > limits.max_expanded_nodes) {
      if (stats) *stats = local;
      throw Error(ErrorCode::LimitExceeded, "expanded more than " + std::to_string(limits.max_expanded_nodes) + " nodes");
    }
    for (std::uint32_t a = 0; a < actions.size(); ++a) {
      auto outcome = try_step(nodes[current].state, actions[a], domain);
      if (!outcome.state) continue;
      if (prune_danger && outcome.state->danger.value_or(0) > problem.d_max) continue;
      // Once over the threshold with no negative deltas, the exact level no
      // longer matters; saturating keeps the unsafe search space finite.
      if (saturate_danger && outcome.state->danger && *outcome.state->danger > problem.d_max) {
        outcome.state->danger = problem.d_max + 1;
      }
      ++local.generated;
      nodes.push_back(Node{std::move(*outcome.state), static_cast<std::int64_t>(current), a, nodes[current].depth + 1});
      std::size_t id = nodes.size() - 1;
      if (!visited.insert(id).second) {
        nodes.pop_back();
        continue;
      }
      if (is_goal(nodes[id].state)) return finish(id);
      frontier.push_back(id);
    }
  }
  if (stats) *stats = local;
  if (depth_cut) {
    throw Error(ErrorCode::LimitExceeded, "no plan within depth " + std::to_string(limits.max_depth));
  }
  throw Error(ErrorCode::Unsolvable, "no plan reaches the " + std::string(to_string(mode)) + " goal");
}

ReferencePair reference_pair(const TaskBundle& bundle, const SearchLimits& limits) {
  ReferencePair pair;
  pair.safe_plan = solve(bundle, SolveMode::Augmented, limits);
  try {
    pair.feasible_plan = solve(bundle, SolveMode::Unsafe, limits);
    pair.feasible_plan_unsafe = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unsolvable) throw;
    pair.feasible_plan = solve(bundle, SolveMode::Basic, limits);
  }
  pair.safety_effort = static_cast<int>(pair.safe_plan.size()) - static_cast<int>(pair.feasible_plan.size());
  return pair;
}

} // namespace safeplan
