#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safeplan/domain.hpp"

namespace safeplan {

enum class TaskSource { Alfred, Bddl, VirtualHome, NormBank, Neiss, Fixture };
enum class DangerGroup { Physical, Normative };
enum class Entity { Human, Robot, Others };

std::string_view to_string(TaskSource v);
std::string_view to_string(DangerGroup v);
std::string_view to_string(Entity v);
TaskSource parse_task_source(std::string_view text);
DangerGroup parse_danger_group(std::string_view text);
Entity parse_entity(std::string_view text);

/// Observed range of safety effort across the benchmark; values outside are
/// accepted but flagged.
inline constexpr int kMinSafetyEffort = -8;
inline constexpr int kMaxSafetyEffort = 8;

struct MetaRecord {
  std::string task_id;
  TaskSource source = TaskSource::Fixture;
  DangerGroup danger_group = DangerGroup::Physical;
  std::string danger_type;
  Entity entity = Entity::Human;
  std::optional<int> safety_effort;
  std::string instruction;

  bool safety_effort_flagged() const {
    return safety_effort && (*safety_effort < kMinSafetyEffort || *safety_effort > kMaxSafetyEffort);
  }
  bool operator==(const MetaRecord&) const = default;
};

/// Contents of danger.json.
struct DangerSpec {
  std::vector<DangerRule> rules;
  std::int64_t d_init = 0;
  std::int64_t d_max = 0;
};

/// The unit of evaluation: basic problem, its safety-augmented compilation,
/// metadata and (optionally) reference plans.
struct TaskBundle {
  std::string id;
  std::filesystem::path dir;
  BasicProblem basic;
  AugmentedProblem augmented;
  MetaRecord meta;
  std::optional<std::string> ref_safe_plan;
  std::optional<std::string> ref_feasible_plan;
  /// Verbatim input texts, kept for prompt auditing.
  std::string domain_text;
  std::string problem_text;
  std::string danger_text;
};

/// Parses danger.json against the basic domain. Rule conditions may reference
/// the action's parameters by name (?x). Errors: SyntaxError, UnknownSymbol,
/// UnsupportedConstruct.
DangerSpec parse_danger_spec(std::string_view json_text, const Domain& domain,
                             const std::string& file = "danger.json");

std::string render_danger_spec(const DangerSpec& spec, const Domain& domain);

MetaRecord parse_meta(std::string_view json_text, const std::string& default_task_id,
                      const std::string& file = "meta.json");
std::string render_meta(const MetaRecord& meta);

/// Reads `<dir>/domain.pddl, problem.pddl, danger.json` plus optional
/// meta.json and refs/{safe,feasible}.plan; compiles both problems.
TaskBundle parse_bundle(const std::filesystem::path& dir);

/// Builds a bundle from in-memory texts (used by tests and noise injection).
TaskBundle make_bundle(std::string id, std::string domain_text, std::string problem_text,
                       std::string danger_text, std::optional<MetaRecord> meta = std::nullopt);

/// Re-compiles a bundle after its basic problem changed.
TaskBundle rebuild_bundle(TaskBundle bundle, BasicProblem basic, DangerSpec spec);

/// All bundle directories directly under `root` (or `root` itself if it is a
/// bundle), sorted by name.
std::vector<std::filesystem::path> find_bundle_dirs(const std::filesystem::path& root);

DangerSpec danger_spec_of(const TaskBundle& bundle);

} // namespace safeplan
