#include "safeplan/bundle_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "file_util.hpp"
#include "json_util.hpp"
#include "safeplan/error.hpp"

namespace safeplan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

VerdictKind parse_verdict_kind(std::string_view text, const std::string& file) {
  for (VerdictKind k : {VerdictKind::Infeasible, VerdictKind::FeasibleUnsafe, VerdictKind::Safe}) {
    if (to_string(k) == text) return k;
  }
  detail::json_fail(ErrorCode::SyntaxError, "unknown verdict '" + std::string(text) + "'", file);
}

json optional_string(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

json rate_json(const Rate& r) {
  return json{{"num", r.num}, {"den", r.den}, {"value", r.decimal()}};
}

json fit_json(const RegressionFit& f) {
  json j{{"beta0", f.beta0}, {"beta1", f.beta1}, {"r2", f.r2}, {"n", f.n}};
  j["ci95"] = f.ci95 ? json::array({f.ci95->lo, f.ci95->hi}) : json(nullptr);
  return j;
}

json ratio_json(const std::optional<RatioEstimate>& r) {
  if (!r) return nullptr;
  return json{{"ratio", r->ratio}, {"ci95", json::array({r->ci95.lo, r->ci95.hi})}, {"excludes_one", r->excludes_one()}};
}

/// JSON numbers must be finite; NaN/inf become null.
json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace

std::string render_result_line(const ResultLine& line) {
  const auto& r = line.record;
  json events = json::array();
  for (const auto& e : r.danger_events) events.push_back(json{{"step", e.step}, {"rule", e.rule}, {"delta", e.delta}});
  json j{
      {"task_id", r.task_id},
      {"model_id", r.model_id},
      {"plan_raw", line.plan_raw},
      {"verdict", to_string(r.verdict)},
      {"F", r.feasible ? 1 : 0},
      {"S", r.safe ? 1 : 0},
      {"SI", r.si ? 1 : 0},
      {"failure_reason", optional_string(r.failure_reason)},
      {"danger_events", events},
      {"relaxed_danger", r.relaxed_danger},
      {"acquisition_error", optional_string(r.acquisition_error)},
      {"parse",
       {{"resolved", r.parse.resolved},
        {"unknown_action", r.parse.unknown_action},
        {"malformed", r.parse.malformed},
        {"ignored_lines", r.parse.ignored_lines}}},
      {"slice",
       {{"source", r.slice.source},
        {"danger_group", r.slice.danger_group},
        {"danger_type", r.slice.danger_type},
        {"entity", r.slice.entity}}},
  };
  if (line.eval_ms) j["timings"] = json{{"eval_ms", *line.eval_ms}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

ResultLine parse_result_line(std::string_view text, const std::string& file) {
  json j = detail::parse_json(text, file);
  ResultLine line;
  auto& r = line.record;
  try {
    r.task_id = j.at("task_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    line.plan_raw = j.value("plan_raw", "");
    r.verdict = parse_verdict_kind(j.at("verdict").get<std::string>(), file);
    r.feasible = j.at("F").get<int>() != 0;
    r.safe = j.at("S").get<int>() != 0;
    r.si = j.at("SI").get<int>() != 0;
    if (j.contains("failure_reason") && !j["failure_reason"].is_null()) {
      r.failure_reason = j["failure_reason"].get<std::string>();
    }
    if (j.contains("acquisition_error") && !j["acquisition_error"].is_null()) {
      r.acquisition_error = j["acquisition_error"].get<std::string>();
    }
    for (const auto& e : j.value("danger_events", json::array())) {
      r.danger_events.push_back(
          DangerEvent{e.at("step").get<std::size_t>(), e.at("rule").get<std::size_t>(), e.at("delta").get<std::int64_t>()});
    }
    r.relaxed_danger = j.value("relaxed_danger", std::int64_t{0});
    if (j.contains("parse")) {
      const auto& p = j["parse"];
      r.parse = ParseStats{p.value("resolved", std::size_t{0}), p.value("unknown_action", std::size_t{0}),
                           p.value("malformed", std::size_t{0}), p.value("ignored_lines", std::size_t{0})};
    }
    if (j.contains("slice")) {
      const auto& s = j["slice"];
      r.slice = SliceAttributes{s.value("source", ""), s.value("danger_group", ""), s.value("danger_type", ""),
                                s.value("entity", "")};
    }
    if (j.contains("timings") && j["timings"].contains("eval_ms")) line.eval_ms = j["timings"]["eval_ms"].get<double>();
  } catch (const json::exception& e) {
    detail::json_fail(ErrorCode::SyntaxError, std::string("bad result line: ") + e.what(), file);
  }
  if (!r.consistent()) {
    detail::json_fail(ErrorCode::SyntaxError, "verdict disagrees with F/S bits for " + r.task_id, file);
  }
  return line;
}

void write_results(const fs::path& path, const std::vector<ResultLine>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += render_result_line(l);
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

std::vector<ResultLine> read_results(const fs::path& path) {
  auto text = detail::read_file(path);
  std::vector<ResultLine> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_result_line(line, path.string() + ":" + std::to_string(n)));
  }
  return out;
}

std::vector<RawPlanText> read_plans_jsonl(std::string_view text, const std::string& file) {
  std::vector<RawPlanText> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = file + ":" + std::to_string(n);
    json j = detail::parse_json(line, where);
    try {
      out.push_back(RawPlanText{j.at("plan").get<std::string>(), j.at("model_id").get<std::string>(),
                                j.at("task_id").get<std::string>(), std::nullopt});
    } catch (const json::exception& e) {
      detail::json_fail(ErrorCode::SyntaxError, std::string("bad plan line: ") + e.what(), where);
    }
  }
  return out;
}

std::vector<RawPlanText> read_plan_directory(const fs::path& root, const std::vector<std::string>& task_ids) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::IoError, root.string() + " is not a directory");
  std::vector<std::string> models;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) models.push_back(entry.path().filename().string());
  }
  std::sort(models.begin(), models.end());
  std::vector<RawPlanText> out;
  for (const auto& model : models) {
    for (const auto& task : task_ids) {
      RawPlanText raw{"", model, task, std::nullopt};
      if (auto text = detail::read_file_if_exists(root / model / (task + ".txt"))) {
        raw.text = std::move(*text);
      } else {
        raw.error = std::string(to_string(ErrorCode::MissingPlanFile)) + ": " + model + "/" + task + ".txt";
      }
      out.push_back(std::move(raw));
    }
  }
  return out;
}

void write_bundle(const TaskBundle& bundle, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  detail::write_file_atomic(dir / "domain.pddl", bundle.domain_text);
  detail::write_file_atomic(dir / "problem.pddl", bundle.problem_text);
  detail::write_file_atomic(dir / "danger.json", bundle.danger_text);
  detail::write_file_atomic(dir / "meta.json", render_meta(bundle.meta));
  if (bundle.ref_safe_plan || bundle.ref_feasible_plan) {
    fs::create_directories(dir / "refs", ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + (dir / "refs").string());
    if (bundle.ref_safe_plan) detail::write_file_atomic(dir / "refs" / "safe.plan", *bundle.ref_safe_plan);
    if (bundle.ref_feasible_plan) detail::write_file_atomic(dir / "refs" / "feasible.plan", *bundle.ref_feasible_plan);
  }
}

std::string render_report_json(const AnalysisReport& report) {
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back(json{
        {"model_id", s.model_id},
        {"slice_key", to_string(s.slice_key)},
        {"slice_value", s.slice_value},
        {"n_tasks", s.n_tasks},
        {"F", rate_json(s.feasibility)},
        {"S", rate_json(s.safety)},
        {"SI", rate_json(s.safety_intention)},
        {"SP", s.safety_precision ? rate_json(*s.safety_precision) : json(nullptr)},
    });
  }
  json scaling = nullptr;
  if (report.scaling) {
    const auto& sc = *report.scaling;
    scaling = json{
        {"models", sc.models},
        {"excluded", sc.excluded},
        {"F", fit_json(sc.feasibility)},
        {"S", fit_json(sc.safety)},
        {"SI", fit_json(sc.safety_intention)},
        {"S_over_F", ratio_json(sc.safety_over_feasibility)},
        {"SI_over_F", ratio_json(sc.intention_over_feasibility)},
    };
  }
  json difficulty = nullptr;
  if (report.difficulty) {
    json tasks = json::object();
    for (const auto& [task, rates] : report.difficulty->tasks) {
      tasks[task] = json{{"F", rate_json(rates[0])}, {"S", rate_json(rates[1])}, {"SI", rate_json(rates[2])}};
    }
    difficulty = json{{"panel", report.difficulty->panel}, {"tasks", tasks}};
  }
  json effects = json::array();
  for (const auto& e : report.effects) {
    effects.push_back(json{{"attribute", e.attribute},
                           {"metric", to_string(e.metric)},
                           {"cohens_d", e.d ? number_or_null(*e.d) : json(nullptr)}});
  }
  json j{
      {"schema_version", kReportSchemaVersion},
      {"seed", report.seed},
      {"resamples", report.resamples},
      {"summaries", summaries},
      {"scaling", scaling},
      {"decomposition", report.decomposition ? fit_json(*report.decomposition) : json(nullptr)},
      {"difficulty", difficulty},
      {"effects", effects},
      {"warnings", report.warnings},
  };
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string render_report_csv(const AnalysisReport& report) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "model_id,slice_key,slice_value,n_tasks,F,S,SI,SP\n";
  for (const auto& s : report.summaries) {
    out += quote(s.model_id) + "," + std::string(to_string(s.slice_key)) + "," + quote(s.slice_value) + "," +
           std::to_string(s.n_tasks) + "," + s.feasibility.decimal() + "," + s.safety.decimal() + "," +
           s.safety_intention.decimal() + "," + (s.safety_precision ? s.safety_precision->decimal() : "") + "\n";
  }
  return out;
}

void write_report(const fs::path& dir, const AnalysisReport& report) {
  if (report.summaries.empty()) throw Error(ErrorCode::EmptyInput, "report has no summaries");
  // Render both before touching the filesystem so a failure leaves nothing.
  auto report_json = render_report_json(report);
  auto report_csv = render_report_csv(report);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  detail::write_file_atomic(dir / "report.json", report_json);
  detail::write_file_atomic(dir / "report.csv", report_csv);
}

} // namespace safeplan
