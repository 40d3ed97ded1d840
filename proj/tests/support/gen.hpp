#pragma once

// Random small planning tasks for property tests. The generator keeps its own
// model of the task (independent of safeplan::Domain) and renders it to the
// bundle text formats, so the naive interpreter in naive.hpp can judge plans
// without sharing any code with the library.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gen {

/// A term: parameter index (>= 0) or object index encoded as -(obj + 1).
using TermRef = int;

struct Lit {
  int pred = 0;
  std::vector<TermRef> args;
  bool negated = false;
};

enum class Cmp { Lt, Le, Eq, Ge, Gt };

struct NumCond {
  Cmp op = Cmp::Ge;
  long long value = 0;
};

enum class NumOp { Assign, Increase, Decrease };

struct NumEff {
  NumOp op = NumOp::Increase;
  long long value = 1;
};

struct Cond {
  std::vector<Lit> lits;
  std::optional<NumCond> num;  // over the single fluent "level"
};

struct CondEffect {
  Cond when;
  std::vector<Lit> effects;  // negated = delete
  std::optional<NumEff> num;
};

struct Action {
  std::string name;
  int arity = 0;
  Cond pre;
  std::vector<Lit> effects;
  std::optional<NumEff> num;
  std::vector<CondEffect> conditional;
};

struct Rule {
  int action = 0;
  std::vector<int> binding;  // -1 wildcard, else object index
  Cond when;
  long long delta = 1;
};

struct GroundAtomText {
  int pred;
  std::vector<int> objs;
  bool operator<(const GroundAtomText& o) const {
    return pred != o.pred ? pred < o.pred : objs < o.objs;
  }
  bool operator==(const GroundAtomText& o) const { return pred == o.pred && objs == o.objs; }
};

struct Step {
  int action;
  std::vector<int> objs;
};

struct Task {
  int n_objects = 2;
  std::vector<int> pred_arity;
  bool has_level = false;
  std::vector<Action> actions;
  std::vector<Rule> rules;
  std::vector<GroundAtomText> init;
  long long init_level = 0;
  std::vector<Lit> goal;  // ground (object terms only)
  std::optional<NumCond> goal_level;
  long long d_init = 0;
  long long d_max = 0;

  std::string object_name(int o) const { return "o" + std::to_string(o); }
  std::string pred_name(int p) const { return "p" + std::to_string(p); }

  std::string domain_pddl() const;
  std::string problem_pddl() const;
  std::string danger_json() const;
  /// One-line summary for failure messages.
  std::string describe() const;
  /// Step in "ACT(o0, o1)" form.
  std::string step_text(const Step& s) const;
};

struct Options {
  int max_objects = 3;
  int max_preds = 4;
  int max_actions = 4;
  int max_rules = 3;
  bool numeric = true;
  bool negative_deltas = true;
};

Task random_task(std::mt19937_64& rng, const Options& options = {});

/// Random plan over the task's ground actions (may be inapplicable).
std::vector<Step> random_plan(const Task& task, std::mt19937_64& rng, int max_len);

/// A random walk of applicable actions from init, then a goal satisfied by
/// the final state. Returns the walk; task.goal is overwritten.
std::vector<Step> feasible_walk(Task& task, std::mt19937_64& rng, int max_len);

} // namespace gen
