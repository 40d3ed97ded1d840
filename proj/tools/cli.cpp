#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "safeplan/analysis.hpp"
#include "safeplan/bundle.hpp"
#include "safeplan/bundle_io.hpp"
#include "safeplan/error.hpp"
#include "safeplan/executor.hpp"
#include "safeplan/metrics.hpp"
#include "safeplan/noise.hpp"
#include "safeplan/planner.hpp"
#include "safeplan/prompt.hpp"
#include "safeplan/relaxed_executor.hpp"
#include "safeplan/runner.hpp"

namespace safeplan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string format = "text";
  bool quiet = false;
  std::size_t parallel = 1;
  std::string provider;
  double timeout_s = 120.0;
  std::string model;
  std::string token_env;
  double temperature = 0.0;
  int max_retries = 3;
  std::string prompt_template;
  std::size_t resamples = kDefaultResamples;

  bool json() const { return format == "json"; }
};

std::string fixed(double v, int places = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

std::vector<TaskBundle> load_bundles(const fs::path& root) {
  std::vector<TaskBundle> out;
  for (const auto& dir : find_bundle_dirs(root)) out.push_back(parse_bundle(dir));
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no task bundles under " + root.string());
  return out;
}

std::map<std::string, TaskAttributes> task_attributes(const std::vector<TaskBundle>& bundles) {
  std::map<std::string, TaskAttributes> out;
  for (const auto& b : bundles) {
    TaskAttributes a;
    if (b.ref_safe_plan) {
      a.plan_length = static_cast<double>(parse_plan(*b.ref_safe_plan, *b.augmented.domain).count(StepStatus::Resolved));
    }
    if (b.meta.safety_effort) a.safety_effort = *b.meta.safety_effort;
    out[b.id] = a;
  }
  return out;
}

std::string describe_event(const TaskBundle& bundle, const Plan& plan, const DangerEvent& e) {
  const auto& domain = *bundle.augmented.domain;
  const auto& rule = bundle.augmented.rules.at(e.rule);
  std::string text = "step " + std::to_string(e.step) + ": ";
  const auto& step = plan.steps.at(e.step - 1);
  text += step.action ? format_action(domain, *step.action) : step.text;
  if (!rule.condition.empty() && step.action) {
    text += " under ";
    for (std::size_t i = 0; i < rule.condition.conjuncts.size(); ++i) {
      if (i) text += " and ";
      text += format_conjunct(domain, rule.condition.conjuncts[i], step.action->args);
    }
  }
  text += " (danger " + std::string(e.delta >= 0 ? "+" : "") + std::to_string(e.delta) + ")";
  return text;
}

// ---------------------------------------------------------------------------

int cmd_check_plan(const Globals& g, const std::string& bundle_dir, const std::string& plan_path, std::ostream& out) {
  auto bundle = parse_bundle(bundle_dir);
  auto text = read_text(plan_path);
  Plan plan = parse_plan(text, *bundle.augmented.domain);
  auto run = run_plan(plan, bundle);
  auto relaxed = relaxed_run(plan, bundle);
  auto kind = kind_of(run.verdict);
  std::int64_t terminal = run.trace.states.empty() ? bundle.augmented.d_init
                                                   : run.trace.states.back().danger.value_or(bundle.augmented.d_init);

  if (g.json()) {
    json events = json::array();
    for (const auto& e : run.trace.danger_events) {
      events.push_back(json{{"step", e.step}, {"rule", e.rule}, {"delta", e.delta},
                            {"description", describe_event(bundle, plan, e)}});
    }
    json steps = json::array();
    for (const auto& s : plan.steps) {
      steps.push_back(json{{"line", s.line}, {"text", s.text}, {"status", to_string(s.status)}});
    }
    json failure = nullptr;
    if (const auto* inf = std::get_if<Infeasible>(&run.verdict)) {
      failure = json{{"kind", to_string(inf->reason.kind)},
                     {"step", inf->reason.step ? json(*inf->reason.step) : json(nullptr)},
                     {"unsatisfied", inf->reason.unsatisfied},
                     {"detail", inf->reason.detail}};
    }
    json j{{"task_id", bundle.id},      {"verdict", to_string(kind)},   {"F", run.feasible ? 1 : 0},
           {"S", run.safe ? 1 : 0},     {"SI", relaxed.si ? 1 : 0},     {"terminal_danger", terminal},
           {"d_max", bundle.augmented.d_max}, {"relaxed_danger", relaxed.trace.terminal_danger},
           {"danger_events", events},   {"failure", failure},           {"steps", steps}};
    out << j.dump(2) << "\n";
  } else if (!g.quiet || kind != VerdictKind::Safe) {
    out << to_string(kind) << "\n";
    if (!g.quiet) {
      for (const auto& e : run.trace.danger_events) out << "  danger event at " << describe_event(bundle, plan, e) << "\n";
      if (const auto* inf = std::get_if<Infeasible>(&run.verdict)) {
        out << "  " << to_string(inf->reason.kind);
        if (inf->reason.step) out << " at step " << *inf->reason.step;
        if (!inf->reason.detail.empty()) out << ": " << inf->reason.detail;
        out << "\n";
        for (const auto& u : inf->reason.unsatisfied) out << "    unsatisfied: " << u << "\n";
      } else {
        out << "  terminal danger " << terminal << " (d_max " << bundle.augmented.d_max << ")\n";
      }
      out << "  SI " << (relaxed.si ? 1 : 0) << " (relaxed danger " << relaxed.trace.terminal_danger << ")\n";
    }
  }
  return kind == VerdictKind::Safe ? kSuccess : kNegativeVerdict;
}

int cmd_solve(const Globals& g, const std::string& bundle_dir, const std::string& mode_text, const SearchLimits& limits,
              std::ostream& out, std::ostream& err) {
  auto bundle = parse_bundle(bundle_dir);
  auto mode = parse_solve_mode(mode_text);
  SearchStats stats;
  Plan plan;
  try {
    plan = solve(bundle, mode, limits, &stats);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unsolvable && e.code() != ErrorCode::LimitExceeded) throw;
    err << e.what() << "\n";
    return kNegativeVerdict;
  }
  const auto& domain = *bundle.augmented.domain;
  if (g.json()) {
    json steps = json::array();
    for (const auto& s : plan.steps) steps.push_back(format_action(domain, *s.action));
    out << json{{"task_id", bundle.id},
                {"mode", to_string(mode)},
                {"length", plan.size()},
                {"plan", steps},
                {"stats",
                 {{"expanded", stats.expanded},
                  {"generated", stats.generated},
                  {"ground_actions", stats.ground_actions},
                  {"relevant_actions", stats.relevant_actions}}}}
               .dump(2)
        << "\n";
  } else {
    out << format_plan(domain, plan);
  }
  return kSuccess;
}

int cmd_validate(const Globals& g, const std::string& root, bool write_refs, const SearchLimits& limits,
                 std::ostream& out) {
  json report = json::array();
  bool all_ok = true;
  for (const auto& dir : find_bundle_dirs(root)) {
    std::vector<std::string> problems;
    json entry{{"bundle", dir.filename().string()}};
    try {
      auto bundle = parse_bundle(dir);
      entry["task_id"] = bundle.id;
      auto pair = reference_pair(bundle, limits);
      const auto& domain = *bundle.augmented.domain;
      entry["safe_length"] = pair.safe_plan.size();
      entry["feasible_length"] = pair.feasible_plan.size();
      entry["safety_effort"] = pair.safety_effort;
      entry["unsafe_plan_exists"] = pair.feasible_plan_unsafe;

      if (bundle.meta.safety_effort && *bundle.meta.safety_effort != pair.safety_effort && !write_refs) {
        problems.push_back("meta safety_effort " + std::to_string(*bundle.meta.safety_effort) + " but oracle gives " +
                           std::to_string(pair.safety_effort));
      }
      if (bundle.meta.safety_effort_flagged()) problems.push_back("safety_effort outside [-8, 8]");
      if (bundle.ref_safe_plan && !write_refs) {
        auto plan = parse_plan(*bundle.ref_safe_plan, domain);
        auto run = run_plan(plan, bundle);
        if (!run.safe) problems.push_back("refs/safe.plan is " + std::string(to_string(kind_of(run.verdict))));
        if (plan.size() != pair.safe_plan.size()) problems.push_back("refs/safe.plan is not a shortest safe plan");
      }
      if (bundle.ref_feasible_plan && !write_refs) {
        auto plan = parse_plan(*bundle.ref_feasible_plan, domain);
        auto run = run_plan(plan, bundle);
        if (!run.feasible) problems.push_back("refs/feasible.plan is Infeasible");
        if (pair.feasible_plan_unsafe && run.safe) problems.push_back("refs/feasible.plan should be unsafe");
        if (plan.size() != pair.feasible_plan.size()) problems.push_back("refs/feasible.plan has the wrong length");
      }
      auto audit = audit_prompt(render_prompt(bundle), bundle);
      if (!audit.passed) {
        std::string leaked;
        for (const auto& t : audit.leaked_tokens) leaked += " " + t;
        problems.push_back("prompt leaks danger-only tokens:" + leaked);
      }
      if (write_refs && problems.empty()) {
        fs::create_directories(dir / "refs");
        write_text(dir / "refs" / "safe.plan", format_plan(domain, pair.safe_plan));
        write_text(dir / "refs" / "feasible.plan", format_plan(domain, pair.feasible_plan));
        auto meta = bundle.meta;
        meta.safety_effort = pair.safety_effort;
        write_text(dir / "meta.json", render_meta(meta));
      }
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
    entry["ok"] = problems.empty();
    entry["problems"] = problems;
    all_ok = all_ok && problems.empty();
    if (!g.json() && (!g.quiet || !problems.empty())) {
      out << entry["bundle"].get<std::string>() << ": " << (problems.empty() ? "ok" : "FAIL");
      if (entry.contains("safe_length")) {
        out << " (safe " << entry["safe_length"] << ", feasible " << entry["feasible_length"] << ", effort "
            << entry["safety_effort"] << ")";
      }
      out << "\n";
      for (const auto& p : problems) out << "  " << p << "\n";
    }
    report.push_back(entry);
  }
  if (g.json()) out << report.dump(2) << "\n";
  return all_ok ? kSuccess : kNegativeVerdict;
}

ProviderConfig provider_from(const Globals& g) {
  if (g.provider.empty()) throw Error(ErrorCode::InvalidArgument, "--provider is required");
  auto p = parse_provider(g.provider);
  p.timeout_s = g.timeout_s;
  p.model = g.model;
  p.token_env = g.token_env;
  p.temperature = g.temperature;
  p.max_retries = g.max_retries;
  if (!g.prompt_template.empty()) p.prompt_template = g.prompt_template;
  return p;
}

std::vector<RawPlanText> acquire(const Globals& g, const std::vector<TaskBundle>& bundles,
                                 const std::string& plans_jsonl) {
  if (!plans_jsonl.empty()) {
    auto raws = read_plans_jsonl(read_text(plans_jsonl), plans_jsonl);
    // Keep N constant per model: every (model, task) pair gets a record.
    std::map<std::pair<std::string, std::string>, RawPlanText> by_key;
    std::set<std::string> models;
    for (auto& r : raws) {
      models.insert(r.model_id);
      auto key = std::make_pair(r.model_id, r.task_id);
      if (by_key.count(key)) {
        throw Error(ErrorCode::DuplicateRecord, "two plans for model '" + r.model_id + "' and task '" + r.task_id + "'");
      }
      by_key.emplace(key, std::move(r));
    }
    std::vector<RawPlanText> out;
    for (const auto& m : models) {
      for (const auto& b : bundles) {
        auto it = by_key.find({m, b.id});
        if (it != by_key.end()) {
          out.push_back(it->second);
        } else {
          out.push_back(RawPlanText{"", m, b.id, "MissingPlanFile: no plan in " + plans_jsonl});
        }
      }
    }
    return out;
  }

  auto provider = provider_from(g);
  std::vector<std::pair<std::string, ProviderConfig>> runs;
  if (provider.kind == ProviderConfig::Kind::Directory) {
    std::error_code ec;
    if (!fs::is_directory(provider.directory, ec)) {
      throw Error(ErrorCode::IoError, provider.directory.string() + " is not a directory");
    }
    std::vector<std::string> models;
    if (!g.model.empty()) {
      models.push_back(g.model);
    } else {
      for (const auto& entry : fs::directory_iterator(provider.directory)) {
        if (entry.is_directory()) models.push_back(entry.path().filename().string());
      }
      std::sort(models.begin(), models.end());
    }
    if (models.empty()) {
      runs.emplace_back(fs::path(provider.directory).lexically_normal().parent_path().filename().string(), provider);
      if (runs.back().first.empty()) runs.back().first = "model";
    }
    for (const auto& m : models) {
      auto p = provider;
      p.directory = provider.directory / m;
      runs.emplace_back(m, p);
    }
  } else {
    runs.emplace_back(g.model.empty() ? std::string(to_string(provider.kind)) : g.model, provider);
  }

  std::vector<RawPlanText> out;
  for (const auto& [model, p] : runs) {
    auto raws = collect_plans(bundles, p, model, g.parallel);
    out.insert(out.end(), raws.begin(), raws.end());
  }
  return out;
}

AnalysisReport build_report(const Globals& g, const std::vector<EvalRecord>& records, const std::string& models_csv,
                            const std::vector<TaskBundle>& bundles) {
  std::vector<ModelMetadata> metadata;
  if (!models_csv.empty()) metadata = parse_model_metadata(read_text(models_csv));
  return analyze(records, metadata, task_attributes(bundles), g.seed, g.resamples);
}

void print_report(const Globals& g, const AnalysisReport& report, std::ostream& out) {
  if (g.quiet) return;
  if (g.json()) {
    out << render_report_json(report);
    return;
  }
  out << "model                          n      F      S     SI     SP\n";
  for (const auto& s : report.summaries) {
    if (s.slice_key != SliceKey::All) continue;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %3lld %6s %6s %6s %6s\n", s.model_id.c_str(),
                  static_cast<long long>(s.n_tasks), fixed(s.feasibility.value()).c_str(),
                  fixed(s.safety.value()).c_str(), fixed(s.safety_intention.value()).c_str(),
                  s.safety_precision ? fixed(s.safety_precision->value()).c_str() : "-");
    out << line;
  }
  if (report.scaling) {
    const auto& sc = *report.scaling;
    auto show = [&](const char* name, const RegressionFit& f) {
      out << name << " slope " << fixed(f.beta1, 2) << " pts/OoM";
      if (f.ci95) out << " [" << fixed(f.ci95->lo, 2) << ", " << fixed(f.ci95->hi, 2) << "]";
      out << ", R2 " << fixed(f.r2, 3) << "\n";
    };
    show("F ", sc.feasibility);
    show("S ", sc.safety);
    show("SI", sc.safety_intention);
    auto ratio = [&](const char* name, const std::optional<RatioEstimate>& r) {
      if (!r) return;
      out << name << " " << fixed(r->ratio, 2) << " [" << fixed(r->ci95.lo, 2) << ", " << fixed(r->ci95.hi, 2) << "]\n";
    };
    ratio("S/F slope ratio ", sc.safety_over_feasibility);
    ratio("SI/F slope ratio", sc.intention_over_feasibility);
  }
  if (report.decomposition) {
    out << "S ~ F x SI: slope " << fixed(report.decomposition->beta1, 3) << ", intercept "
        << fixed(report.decomposition->beta0, 3) << ", R2 " << fixed(report.decomposition->r2, 3) << "\n";
  }
  for (const auto& e : report.effects) {
    out << "Cohen's d " << e.attribute << " (" << to_string(e.metric) << " difficulty): "
        << (e.d ? fixed(*e.d, 2) : std::string("n/a")) << "\n";
  }
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
}

int cmd_evaluate(const Globals& g, const std::string& root, const std::string& plans_jsonl, const std::string& out_dir,
                 const std::string& models_csv, bool timings, std::ostream& out) {
  auto bundles = load_bundles(root);
  std::map<std::string, const TaskBundle*> by_id;
  for (const auto& b : bundles) by_id[b.id] = &b;
  auto raws = acquire(g, bundles, plans_jsonl);

  std::vector<ResultLine> lines(raws.size());
  parallel_for(raws.size(), g.parallel, [&](std::size_t i) {
    auto it = by_id.find(raws[i].task_id);
    if (it == by_id.end()) throw Error(ErrorCode::MissingRecord, "plan for unknown task '" + raws[i].task_id + "'");
    auto start = std::chrono::steady_clock::now();
    lines[i].record = evaluate_plan(raws[i], *it->second);
    lines[i].plan_raw = raws[i].text;
    if (timings) {
      lines[i].eval_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });
  std::sort(lines.begin(), lines.end(), [](const ResultLine& a, const ResultLine& b) {
    return std::tie(a.record.task_id, a.record.model_id) < std::tie(b.record.task_id, b.record.model_id);
  });

  std::vector<EvalRecord> records;
  for (const auto& l : lines) records.push_back(l.record);
  auto report = build_report(g, records, models_csv, bundles);

  fs::create_directories(out_dir);
  write_results(fs::path(out_dir) / "results.jsonl", lines);
  write_report(out_dir, report);
  print_report(g, report, out);
  return kSuccess;
}

int cmd_analyze(const Globals& g, const std::string& results, const std::string& models_csv,
                const std::string& bundles_root, const std::string& out_dir, std::ostream& out) {
  auto lines = read_results(results);
  std::vector<EvalRecord> records;
  for (const auto& l : lines) records.push_back(l.record);
  std::vector<TaskBundle> bundles;
  if (!bundles_root.empty()) bundles = load_bundles(bundles_root);
  auto report = build_report(g, records, models_csv, bundles);
  if (!out_dir.empty()) write_report(out_dir, report);
  print_report(g, report, out);
  return kSuccess;
}

int cmd_report(const Globals& g, const std::string& results, const std::string& slice, std::ostream& out) {
  auto lines = read_results(results);
  std::vector<EvalRecord> records;
  for (const auto& l : lines) records.push_back(l.record);
  auto summaries = summarize(records, parse_slice_key(slice));
  if (g.json()) {
    AnalysisReport r;
    r.summaries = summaries;
    out << json::parse(render_report_json(r))["summaries"].dump(2) << "\n";
    return kSuccess;
  }
  out << "model,slice,n,F,S,SI,SP\n";
  for (const auto& s : summaries) {
    out << s.model_id << "," << s.slice_value << "," << s.n_tasks << "," << s.feasibility.decimal() << ","
        << s.safety.decimal() << "," << s.safety_intention.decimal() << ","
        << (s.safety_precision ? s.safety_precision->decimal() : "") << "\n";
  }
  return kSuccess;
}

std::vector<std::size_t> parse_levels(const std::string& text) {
  std::vector<std::size_t> levels;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      auto v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      levels.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidNoiseLevel, "bad noise level '" + item + "'");
    }
  }
  return levels;
}

int cmd_inject(const Globals& g, const std::string& root, const std::string& levels_text, const std::string& out_dir,
               bool allow_arbitrary, std::ostream& out) {
  auto bundles = load_bundles(root);
  auto levels = parse_levels(levels_text);
  bool ok = true;
  json summary = json::array();
  for (auto count : levels) {
    for (const auto& b : bundles) {
      auto noisy = inject(b, NoiseLevel{count, g.seed, allow_arbitrary});
      std::vector<std::string> changed;
      for (const auto* ref : {&b.ref_safe_plan, &b.ref_feasible_plan}) {
        if (!*ref) continue;
        auto before = run_plan(parse_plan(**ref, *b.augmented.domain), b);
        auto after = run_plan(parse_plan(**ref, *noisy.augmented.domain), noisy);
        if (kind_of(before.verdict) != kind_of(after.verdict)) changed.push_back(ref == &b.ref_safe_plan ? "safe" : "feasible");
      }
      ok = ok && changed.empty();
      auto dir = fs::path(out_dir) / ("noise_" + std::to_string(count)) / b.id;
      write_bundle(noisy, dir);
      summary.push_back(json{{"task_id", b.id},
                             {"level", count},
                             {"schemas", noisy.augmented.domain->actions().size()},
                             {"verdict_changes", changed}});
      if (!g.json() && !g.quiet) {
        out << dir.string() << ": " << noisy.augmented.domain->actions().size() << " schemas"
            << (changed.empty() ? "" : ", VERDICT CHANGED") << "\n";
      }
    }
  }
  if (g.json()) out << summary.dump(2) << "\n";
  return ok ? kSuccess : kNegativeVerdict;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Safety-aware plan validation and evaluation", "safeplan"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key = value file", false);

  Globals g;
  app.add_option("--seed", g.seed, "Seed for bootstrap resampling and noise injection");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--quiet", g.quiet, "Only print failures and requested outputs");
  app.add_option("--parallel", g.parallel, "Tasks in flight")->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  app.add_option("--provider", g.provider, "directory:<path>, command:<cmd> or http:<base url>");
  app.add_option("--timeout-s", g.timeout_s, "Per-request timeout in seconds")->check(CLI::PositiveNumber);
  app.add_option("--model", g.model, "Model id (http model name; directory subfolder)");
  app.add_option("--token-env", g.token_env, "Environment variable holding the API token");
  app.add_option("--temperature", g.temperature, "Sampling temperature for http providers");
  app.add_option("--max-retries", g.max_retries, "Retries for http providers")->check(CLI::NonNegativeNumber);
  app.add_option("--prompt-template", g.prompt_template, "Prompt template file");
  app.add_option("--resamples", g.resamples, "Bootstrap resamples");

  std::string bundle, plan_path, mode = "augmented", root, out_dir, plans_jsonl, models_csv, results, slice = "all",
                      levels = "2,4,8,16,32,64", bundles_root;
  bool write_refs = false, timings = false, allow_arbitrary = false;
  SearchLimits limits;

  auto* validate = app.add_subcommand("validate-task", "Parse bundles, solve them and check references");
  validate->add_option("path", root, "Bundle directory or a directory of bundles")->required();
  validate->add_flag("--write-refs", write_refs, "Write refs/ and meta safety_effort from the oracle");
  validate->add_option("--max-nodes", limits.max_expanded_nodes);
  validate->add_option("--max-depth", limits.max_depth);

  auto* check = app.add_subcommand("check-plan", "Execute a plan and print its verdict");
  check->add_option("bundle", bundle, "Bundle directory")->required();
  check->add_option("--plan", plan_path, "Plan file, '-' for stdin")->default_val("-");

  auto* solve_cmd = app.add_subcommand("solve", "Find a shortest plan");
  solve_cmd->add_option("bundle", bundle, "Bundle directory")->required();
  solve_cmd->add_option("--mode", mode, "basic, augmented or unsafe")->check(CLI::IsMember({"basic", "augmented", "unsafe"}));
  solve_cmd->add_option("--max-nodes", limits.max_expanded_nodes);
  solve_cmd->add_option("--max-depth", limits.max_depth);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate model plans over a bundle set");
  evaluate_cmd->add_option("path", root, "Directory of bundles")->required();
  evaluate_cmd->add_option("--plans", plans_jsonl, "JSONL plans file instead of a provider");
  evaluate_cmd->add_option("--out", out_dir, "Output directory")->default_val("results");
  evaluate_cmd->add_option("--models", models_csv, "Model metadata CSV");
  evaluate_cmd->add_flag("--timings", timings, "Record per-plan evaluation time (not reproducible)");

  auto* noise_cmd = app.add_subcommand("inject-noise", "Write copies of bundles with distractor actions");
  noise_cmd->add_option("path", root, "Directory of bundles")->required();
  noise_cmd->add_option("--levels", levels, "Comma-separated distractor counts");
  noise_cmd->add_option("--out", out_dir, "Output directory")->required();
  noise_cmd->add_flag("--allow-arbitrary", allow_arbitrary, "Allow counts outside 2,4,...,64");

  auto* analyze_cmd = app.add_subcommand("analyze", "Scaling, decomposition and difficulty analysis");
  analyze_cmd->add_option("--results", results, "results.jsonl")->required();
  analyze_cmd->add_option("--models", models_csv, "Model metadata CSV");
  analyze_cmd->add_option("--bundles", bundles_root, "Bundle directory for per-task attributes");
  analyze_cmd->add_option("--out", out_dir, "Directory for report.json and report.csv");

  auto* report_cmd = app.add_subcommand("report", "Print per-model rates from results.jsonl");
  report_cmd->add_option("--results", results, "results.jsonl")->required();
  report_cmd->add_option("--slice", slice, "all, source, danger_group, danger_type or entity");

  for (auto* sub : {validate, check, solve_cmd, evaluate_cmd, noise_cmd, analyze_cmd, report_cmd}) sub->fallthrough();

  std::vector<std::string> argv_store{"safeplan"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*validate) return cmd_validate(g, root, write_refs, limits, out);
    if (*check) return cmd_check_plan(g, bundle, plan_path, out);
    if (*solve_cmd) return cmd_solve(g, bundle, mode, limits, out, err);
    if (*evaluate_cmd) return cmd_evaluate(g, root, plans_jsonl, out_dir, models_csv, timings, out);
    if (*noise_cmd) return cmd_inject(g, root, levels, out_dir, allow_arbitrary, out);
    if (*analyze_cmd) return cmd_analyze(g, results, models_csv, bundles_root, out_dir, out);
    if (*report_cmd) return cmd_report(g, results, slice, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Internal ? kInternalError : kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kUsageError;
}

} // namespace safeplan::cli
