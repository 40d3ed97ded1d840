#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "safeplan/metrics.hpp"

namespace safeplan {

inline constexpr std::size_t kDefaultResamples = 10'000;

struct Interval95 {
  double lo = 0.0;
  double hi = 0.0;
};

struct RegressionFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  std::optional<Interval95> ci95;  // percentile bootstrap CI of beta1
  std::uint64_t seed = 0;
  std::size_t resamples = 0;
};

/// Ordinary least squares of y on x. R^2 is 0 when y is constant.
/// Errors: TooFewPoints (< 2), DegenerateX.
RegressionFit ols(const std::vector<double>& x, const std::vector<double>& y);

/// OLS of rate (percentage points) on log10(params in billions), with a
/// percentile bootstrap (2.5 / 97.5) over `resamples` replicates that resample
/// points with replacement. Replicate r draws from CounterRng(seed, r);
/// resamples whose x values are all equal are redrawn from the same stream.
/// Errors: TooFewPoints (< 3), DegenerateX, InvalidArgument (params <= 0).
RegressionFit loglinear_fit(const std::vector<std::pair<double, double>>& points, std::uint64_t seed,
                            std::size_t resamples = kDefaultResamples);

struct PairedPoint {
  double params_b = 0.0;
  double numerator = 0.0;    // e.g. S in points
  double denominator = 0.0;  // e.g. F in points
};

struct RatioEstimate {
  double ratio = 0.0;
  Interval95 ci95;
  std::uint64_t seed = 0;
  std::size_t resamples = 0;
  bool excludes_one() const { return ci95.hi < 1.0 || ci95.lo > 1.0; }
};

/// beta_num / beta_den with a paired bootstrap: each replicate resamples
/// models once and refits both regressions on the same draw.
/// Errors: DenominatorSlopeNearZero when |beta_den| < epsilon, plus those of
/// loglinear_fit.
RatioEstimate slope_ratio(const RegressionFit& numerator, const RegressionFit& denominator,
                          const std::vector<PairedPoint>& points, std::uint64_t seed,
                          std::size_t resamples = kDefaultResamples, double epsilon = 1e-9);

struct DecompositionPoint {
  double feasibility = 0.0;
  double safety_intention = 0.0;
  double safety = 0.0;
};

/// OLS of S on F x SI. Errors: TooFewPoints (< 3), DegenerateX.
RegressionFit decomposition_fit(const std::vector<DecompositionPoint>& points);

/// (mean_b - mean_a) / pooled SD. Errors: TooFewPoints (a group below 2),
/// ZeroPooledVariance.
double cohens_d(const std::vector<double>& group_a, const std::vector<double>& group_b);

/// Linear-interpolation percentile (q in [0, 1]) of unsorted values.
double percentile(std::vector<double> values, double q);

enum class Metric { Feasibility, Safety, SafetyIntention };
std::string_view to_string(Metric metric);

struct DifficultyTable {
  std::vector<std::string> panel;
  /// task -> difficulty for F, S, SI (failures / panel size).
  std::map<std::string, std::array<Rate, 3>> tasks;
};

/// Errors: EmptyInput, MissingRecord (a panel model lacks a task).
DifficultyTable difficulty_table(const std::vector<EvalRecord>& records,
                                 std::vector<std::string> panel = {});

/// Cohen's d of a per-task attribute (plan length, safety effort, ...)
/// between the easiest (difficulty 0) and hardest (difficulty 1) buckets of
/// `metric`. Empty when a bucket has fewer than 2 tasks or zero variance.
std::optional<double> bucket_effect(const DifficultyTable& table, Metric metric,
                                    const std::map<std::string, double>& attribute);

struct ModelMetadata {
  std::string model_id;
  std::optional<double> total_params_b;  // empty for undisclosed sizes
  std::string family;
  std::string inference_mode;
};

/// CSV with header model_id,total_params_b,family,inference_mode.
std::vector<ModelMetadata> parse_model_metadata(std::string_view csv);

struct ScalingAnalysis {
  std::vector<std::string> models;    // models entering the regressions
  std::vector<std::string> excluded;  // no metadata or undisclosed size
  RegressionFit feasibility;          // rates in percentage points
  RegressionFit safety;
  RegressionFit safety_intention;
  std::optional<RatioEstimate> safety_over_feasibility;
  std::optional<RatioEstimate> intention_over_feasibility;
};

struct EffectSize {
  std::string attribute;  // "plan_length" or "safety_effort"
  Metric metric = Metric::Feasibility;
  std::optional<double> d;
};

/// Per-task covariates for the difficulty effect sizes.
struct TaskAttributes {
  std::optional<double> plan_length;
  std::optional<double> safety_effort;
};

struct AnalysisReport {
  std::uint64_t seed = 0;
  std::size_t resamples = 0;
  std::vector<MetricsSummary> summaries;  // overall, then each slice key
  std::optional<ScalingAnalysis> scaling;
  std::optional<RegressionFit> decomposition;  // S on F x SI over all models, fractions
  std::optional<DifficultyTable> difficulty;
  std::vector<EffectSize> effects;
  std::vector<std::string> warnings;
};

/// Everything the report needs from a set of evaluation records. Parts that
/// the data cannot support (fewer than 3 sized models, a flat denominator
/// slope, ...) are left empty with a warning instead of failing the run.
/// Errors: EmptyInput, DuplicateRecord, MissingRecord.
AnalysisReport analyze(const std::vector<EvalRecord>& records, const std::vector<ModelMetadata>& metadata,
                       const std::map<std::string, TaskAttributes>& attributes, std::uint64_t seed,
                       std::size_t resamples = kDefaultResamples);

} // namespace safeplan
