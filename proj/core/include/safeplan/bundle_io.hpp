#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safeplan/analysis.hpp"
#include "safeplan/bundle.hpp"
#include "safeplan/metrics.hpp"
#include "safeplan/plan.hpp"

namespace safeplan {

inline constexpr std::string_view kReportSchemaVersion = "1.0";

struct ResultLine {
  EvalRecord record;
  std::string plan_raw;
  /// Only written when timings are requested; they are not reproducible.
  std::optional<double> eval_ms;
};

/// One JSON object per line, keys sorted. Enum values are written exactly as
/// to_string() renders them.
std::string render_result_line(const ResultLine& line);
ResultLine parse_result_line(std::string_view text, const std::string& file = "results.jsonl");

void write_results(const std::filesystem::path& path, const std::vector<ResultLine>& lines);
std::vector<ResultLine> read_results(const std::filesystem::path& path);

/// JSONL with {task_id, model_id, plan} objects.
std::vector<RawPlanText> read_plans_jsonl(std::string_view text, const std::string& file = "plans.jsonl");

/// Reads `<root>/<model>/<task>.txt` for every model directory under root.
/// Missing files become RawPlanText with error "missing plan file".
std::vector<RawPlanText> read_plan_directory(const std::filesystem::path& root,
                                             const std::vector<std::string>& task_ids);

/// Writes domain.pddl, problem.pddl, danger.json, meta.json and refs/ (when
/// present) into `dir`, creating it.
void write_bundle(const TaskBundle& bundle, const std::filesystem::path& dir);

std::string render_report_json(const AnalysisReport& report);
std::string render_report_csv(const AnalysisReport& report);

/// Writes report.json and report.csv atomically into `dir`.
void write_report(const std::filesystem::path& dir, const AnalysisReport& report);

} // namespace safeplan
