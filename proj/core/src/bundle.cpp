#include <algorithm>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "file_util.hpp"
#include "json_util.hpp"
#include "safeplan/bundle.hpp"
#include "safeplan/identifier.hpp"
#include "safeplan/pddl.hpp"

namespace fs = std::filesystem;

namespace safeplan {

namespace detail {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> read_file_if_exists(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return std::nullopt;
  return read_file(path);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

} // namespace detail

using nlohmann::json;

std::string_view to_string(TaskSource v) {
  switch (v) {
    case TaskSource::Alfred: return "ALFRED";
    case TaskSource::Bddl: return "BDDL";
    case TaskSource::VirtualHome: return "VirtualHome";
    case TaskSource::NormBank: return "NormBank";
    case TaskSource::Neiss: return "NEISS";
    case TaskSource::Fixture: return "fixture";
  }
  return "fixture";
}

std::string_view to_string(DangerGroup v) {
  return v == DangerGroup::Physical ? "physical" : "normative";
}

std::string_view to_string(Entity v) {
  switch (v) {
    case Entity::Human: return "human";
    case Entity::Robot: return "robot";
    case Entity::Others: return "others";
  }
  return "human";
}

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const E (&values)[N], const char* what) {
  std::string needle = canonical_identifier(text);
  for (E v : values) {
    if (canonical_identifier(to_string(v)) == needle) return v;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + std::string(text) + "'");
}

} // namespace

TaskSource parse_task_source(std::string_view text) {
  static const TaskSource all[] = {TaskSource::Alfred, TaskSource::Bddl, TaskSource::VirtualHome,
                                   TaskSource::NormBank, TaskSource::Neiss, TaskSource::Fixture};
  return parse_enum(text, all, "source");
}

DangerGroup parse_danger_group(std::string_view text) {
  static const DangerGroup all[] = {DangerGroup::Physical, DangerGroup::Normative};
  return parse_enum(text, all, "danger group");
}

Entity parse_entity(std::string_view text) {
  static const Entity all[] = {Entity::Human, Entity::Robot, Entity::Others};
  return parse_enum(text, all, "entity");
}

MetaRecord parse_meta(std::string_view json_text, const std::string& default_task_id, const std::string& file) {
  json doc = detail::parse_json(json_text, file);
  if (!doc.is_object()) detail::json_fail(ErrorCode::SyntaxError, "meta must be a JSON object", file);
  MetaRecord meta;
  try {
    meta.task_id = doc.value("task_id", default_task_id);
    if (doc.contains("source")) meta.source = parse_task_source(doc.at("source").get<std::string>());
    if (doc.contains("danger_group")) meta.danger_group = parse_danger_group(doc.at("danger_group").get<std::string>());
    if (doc.contains("entity")) meta.entity = parse_entity(doc.at("entity").get<std::string>());
    meta.danger_type = doc.value("danger_type", std::string());
    meta.instruction = doc.value("instruction", std::string());
    if (doc.contains("safety_effort") && !doc.at("safety_effort").is_null()) {
      meta.safety_effort = doc.at("safety_effort").get<int>();
    }
  } catch (const json::exception& e) {
    detail::json_fail(ErrorCode::SyntaxError, e.what(), file);
  } catch (const Error& e) {
    detail::json_fail(ErrorCode::SyntaxError, e.what(), file);
  }
  return meta;
}

std::string render_meta(const MetaRecord& meta) {
  json doc{{"task_id", meta.task_id},
           {"source", to_string(meta.source)},
           {"danger_group", to_string(meta.danger_group)},
           {"danger_type", meta.danger_type},
           {"entity", to_string(meta.entity)},
           {"instruction", meta.instruction}};
  doc["safety_effort"] = meta.safety_effort ? json(*meta.safety_effort) : json(nullptr);
  return doc.dump(2) + "\n";
}

TaskBundle make_bundle(std::string id, std::string domain_text, std::string problem_text,
                       std::string danger_text, std::optional<MetaRecord> meta) {
  auto domain = parse_domain_pddl(domain_text, "domain.pddl");
  BasicProblem basic = parse_problem_pddl(problem_text, *domain, "problem.pddl");
  DangerSpec spec = parse_danger_spec(danger_text, *basic.domain, "danger.json");

  TaskBundle bundle;
  bundle.id = id;
  bundle.meta = meta.value_or(MetaRecord{});
  if (bundle.meta.task_id.empty()) bundle.meta.task_id = id;
  bundle.domain_text = std::move(domain_text);
  bundle.problem_text = std::move(problem_text);
  bundle.danger_text = std::move(danger_text);
  return rebuild_bundle(std::move(bundle), std::move(basic), std::move(spec));
}

TaskBundle rebuild_bundle(TaskBundle bundle, BasicProblem basic, DangerSpec spec) {
  bundle.augmented = compile_augmented(basic, std::move(spec.rules), spec.d_init, spec.d_max);
  bundle.basic = std::move(basic);
  return bundle;
}

TaskBundle parse_bundle(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::string id = dir.filename().string();
  if (id.empty()) id = dir.parent_path().filename().string();

  auto domain_text = detail::read_file(dir / "domain.pddl");
  auto problem_text = detail::read_file(dir / "problem.pddl");
  auto danger_text = detail::read_file(dir / "danger.json");

  auto domain = parse_domain_pddl(domain_text, (dir / "domain.pddl").string());
  BasicProblem basic = parse_problem_pddl(problem_text, *domain, (dir / "problem.pddl").string());
  DangerSpec spec = parse_danger_spec(danger_text, *basic.domain, (dir / "danger.json").string());

  TaskBundle bundle;
  bundle.dir = dir;
  if (auto meta_text = detail::read_file_if_exists(dir / "meta.json")) {
    bundle.meta = parse_meta(*meta_text, id, (dir / "meta.json").string());
  } else {
    bundle.meta.task_id = id;
  }
  bundle.id = bundle.meta.task_id;
  bundle.ref_safe_plan = detail::read_file_if_exists(dir / "refs" / "safe.plan");
  bundle.ref_feasible_plan = detail::read_file_if_exists(dir / "refs" / "feasible.plan");
  bundle.domain_text = std::move(domain_text);
  bundle.problem_text = std::move(problem_text);
  bundle.danger_text = std::move(danger_text);
  return rebuild_bundle(std::move(bundle), std::move(basic), std::move(spec));
}

std::vector<fs::path> find_bundle_dirs(const fs::path& root) {
  std::error_code ec;
  if (fs::is_regular_file(root / "domain.pddl", ec)) return {root};
  std::vector<fs::path> out;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::IoError, root.string() + " is not a directory");
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "domain.pddl", ec)) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DangerSpec danger_spec_of(const TaskBundle& bundle) {
  return DangerSpec{bundle.augmented.rules, bundle.augmented.d_init, bundle.augmented.d_max};
}

} // namespace safeplan
