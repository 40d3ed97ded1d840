#include "safeplan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "safeplan/error.hpp"
#include "safeplan/random.hpp"

namespace safeplan {

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

struct Line {
  double beta0, beta1;
};

/// Slope/intercept only; callers guarantee non-degenerate x.
Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double b1 = sxy / sxx;
  return {my - b1 * mx, b1};
}

/// Draws a resample of indices whose x values are not all equal.
std::vector<std::size_t> draw(CounterRng& rng, const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  while (true) {
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(x.size()));
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (x[idx[k]] != x[idx[0]]) return idx;
    }
  }
}

Line fit_indices(const std::vector<double>& x, const std::vector<double>& y, const std::vector<std::size_t>& idx) {
  std::vector<double> bx, by;
  bx.reserve(idx.size());
  by.reserve(idx.size());
  for (auto i : idx) {
    bx.push_back(x[i]);
    by.push_back(y[i]);
  }
  return fit_line(bx, by);
}

std::vector<double> log10_params(const std::vector<double>& params) {
  std::vector<double> x;
  for (double p : params) {
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "parameter counts must be positive");
    x.push_back(std::log10(p));
  }
  return x;
}

} // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

RegressionFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "x and y differ in length");
  if (x.size() < 2) throw Error(ErrorCode::TooFewPoints, "regression needs at least 2 points");
  if (all_equal(x)) throw Error(ErrorCode::DegenerateX, "all predictor values are equal");
  Line line = fit_line(x, y);
  double my = mean(y);
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pred = line.beta0 + line.beta1 * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  RegressionFit fit;
  fit.beta0 = line.beta0;
  fit.beta1 = line.beta1;
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.n = x.size();
  return fit;
}

RegressionFit loglinear_fit(const std::vector<std::pair<double, double>>& points, std::uint64_t seed,
                            std::size_t resamples) {
  if (points.size() < 3) throw Error(ErrorCode::TooFewPoints, "log-linear fit needs at least 3 points");
  std::vector<double> params, y;
  for (const auto& [p, r] : points) {
    params.push_back(p);
    y.push_back(r);
  }
  auto x = log10_params(params);
  RegressionFit fit = ols(x, y);
  fit.seed = seed;
  fit.resamples = resamples;
  if (resamples > 0) {
    std::vector<double> slopes(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
      CounterRng rng(seed, r);
      slopes[r] = fit_indices(x, y, draw(rng, x)).beta1;
    }
    fit.ci95 = Interval95{percentile(slopes, 0.025), percentile(slopes, 0.975)};
  }
  return fit;
}

RatioEstimate slope_ratio(const RegressionFit& numerator, const RegressionFit& denominator,
                          const std::vector<PairedPoint>& points, std::uint64_t seed, std::size_t resamples,
                          double epsilon) {
  if (points.size() < 3) throw Error(ErrorCode::TooFewPoints, "slope ratio needs at least 3 models");
  if (std::abs(denominator.beta1) < epsilon) {
    throw Error(ErrorCode::DenominatorSlopeNearZero, "denominator slope is too close to zero");
  }
  std::vector<double> params, num, den;
  for (const auto& p : points) {
    params.push_back(p.params_b);
    num.push_back(p.numerator);
    den.push_back(p.denominator);
  }
  auto x = log10_params(params);
  if (all_equal(x)) throw Error(ErrorCode::DegenerateX, "all predictor values are equal");

  RatioEstimate out;
  out.ratio = numerator.beta1 / denominator.beta1;
  out.seed = seed;
  out.resamples = resamples;
  if (resamples == 0) {
    out.ci95 = Interval95{out.ratio, out.ratio};
    return out;
  }
  std::vector<double> ratios;
  ratios.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    CounterRng rng(seed, r);
    while (true) {
      auto idx = draw(rng, x);
      double bd = fit_indices(x, den, idx).beta1;
      if (std::abs(bd) < epsilon) continue;
      ratios.push_back(fit_indices(x, num, idx).beta1 / bd);
      break;
    }
  }
  out.ci95 = Interval95{percentile(ratios, 0.025), percentile(ratios, 0.975)};
  return out;
}

RegressionFit decomposition_fit(const std::vector<DecompositionPoint>& points) {
  if (points.size() < 3) throw Error(ErrorCode::TooFewPoints, "decomposition fit needs at least 3 points");
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(p.feasibility * p.safety_intention);
    y.push_back(p.safety);
  }
  return ols(x, y);
}

double cohens_d(const std::vector<double>& group_a, const std::vector<double>& group_b) {
  if (group_a.size() < 2 || group_b.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "Cohen's d needs at least 2 values per group");
  }
  auto var = [](const std::vector<double>& v, double m) {
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  double ma = mean(group_a), mb = mean(group_b);
  double na = static_cast<double>(group_a.size()), nb = static_cast<double>(group_b.size());
  double pooled = ((na - 1) * var(group_a, ma) + (nb - 1) * var(group_b, mb)) / (na + nb - 2);
  if (!(pooled > 0)) throw Error(ErrorCode::ZeroPooledVariance, "pooled variance is zero");
  return (mb - ma) / std::sqrt(pooled);
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Feasibility: return "F";
    case Metric::Safety: return "S";
    case Metric::SafetyIntention: return "SI";
  }
  return "F";
}

DifficultyTable difficulty_table(const std::vector<EvalRecord>& records, std::vector<std::string> panel) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no evaluation records");
  if (panel.empty()) {
    std::set<std::string> models;
    for (const auto& r : records) models.insert(r.model_id);
    panel.assign(models.begin(), models.end());
  }
  std::set<std::string> panel_set(panel.begin(), panel.end());
  std::set<std::string> tasks;
  std::map<std::pair<std::string, std::string>, const EvalRecord*> index;
  for (const auto& r : records) {
    tasks.insert(r.task_id);
    if (panel_set.count(r.model_id)) index[{r.task_id, r.model_id}] = &r;
  }
  DifficultyTable table;
  table.panel = panel;
  auto k = static_cast<std::int64_t>(panel.size());
  for (const auto& task : tasks) {
    std::int64_t fail_f = 0, fail_s = 0, fail_si = 0;
    for (const auto& model : panel) {
      auto it = index.find({task, model});
      if (it == index.end()) {
        throw Error(ErrorCode::MissingRecord, "model '" + model + "' has no record for task '" + task + "'");
      }
      fail_f += !it->second->feasible;
      fail_s += !it->second->safe;
      fail_si += !it->second->si;
    }
    table.tasks[task] = {Rate::of(fail_f, k), Rate::of(fail_s, k), Rate::of(fail_si, k)};
  }
  return table;
}

std::optional<double> bucket_effect(const DifficultyTable& table, Metric metric,
                                    const std::map<std::string, double>& attribute) {
  auto m = static_cast<std::size_t>(metric);
  std::vector<double> easy, hard;
  for (const auto& [task, rates] : table.tasks) {
    auto it = attribute.find(task);
    if (it == attribute.end()) continue;
    if (rates[m].num == 0) easy.push_back(it->second);
    if (rates[m].num == rates[m].den) hard.push_back(it->second);
  }
  try {
    return cohens_d(easy, hard);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<ModelMetadata> parse_model_metadata(std::string_view csv) {
  std::vector<ModelMetadata> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(cell);
    }
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    auto cells = split(line);
    if (header.empty()) {
      header = cells;
      if (std::find(header.begin(), header.end(), "model_id") == header.end() ||
          std::find(header.begin(), header.end(), "total_params_b") == header.end()) {
        throw Error(ErrorCode::SyntaxError, "model metadata needs model_id and total_params_b columns");
      }
      continue;
    }
    ModelMetadata m;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) {
      const auto& h = header[i];
      const auto& v = cells[i];
      if (h == "model_id") {
        m.model_id = v;
      } else if (h == "total_params_b") {
        if (!v.empty()) {
          try {
            std::size_t used = 0;
            double p = std::stod(v, &used);
            if (used != v.size() || !(p > 0)) throw std::invalid_argument(v);
            m.total_params_b = p;
          } catch (const std::exception&) {
            throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line_no) + ": bad total_params_b '" + v + "'");
          }
        }
      } else if (h == "family") {
        m.family = v;
      } else if (h == "inference_mode") {
        m.inference_mode = v;
      }
    }
    if (m.model_id.empty()) throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line_no) + ": empty model_id");
    out.push_back(std::move(m));
  }
  return out;
}

} // namespace safeplan

namespace safeplan {

AnalysisReport analyze(const std::vector<EvalRecord>& records, const std::vector<ModelMetadata>& metadata,
                       const std::map<std::string, TaskAttributes>& attributes, std::uint64_t seed,
                       std::size_t resamples) {
  AnalysisReport report;
  report.seed = seed;
  report.resamples = resamples;
  for (SliceKey key : {SliceKey::All, SliceKey::Source, SliceKey::DangerGroup, SliceKey::DangerType, SliceKey::Entity}) {
    auto part = summarize(records, key);
    report.summaries.insert(report.summaries.end(), part.begin(), part.end());
  }

  std::map<std::string, const MetricsSummary*> overall;
  for (const auto& s : report.summaries) {
    if (s.slice_key == SliceKey::All) overall[s.model_id] = &s;
  }
  std::map<std::string, double> params;
  for (const auto& m : metadata) {
    if (m.total_params_b) params[m.model_id] = *m.total_params_b;
  }

  ScalingAnalysis scaling;
  std::vector<std::pair<double, double>> pf, ps, psi;
  std::vector<PairedPoint> s_pairs, si_pairs;
  for (const auto& [model, summary] : overall) {
    auto it = params.find(model);
    if (it == params.end()) {
      scaling.excluded.push_back(model);
      continue;
    }
    scaling.models.push_back(model);
    double f = 100.0 * summary->feasibility.value();
    double s = 100.0 * summary->safety.value();
    double si = 100.0 * summary->safety_intention.value();
    pf.emplace_back(it->second, f);
    ps.emplace_back(it->second, s);
    psi.emplace_back(it->second, si);
    s_pairs.push_back(PairedPoint{it->second, s, f});
    si_pairs.push_back(PairedPoint{it->second, si, f});
  }
  try {
    scaling.feasibility = loglinear_fit(pf, seed, resamples);
    scaling.safety = loglinear_fit(ps, seed, resamples);
    scaling.safety_intention = loglinear_fit(psi, seed, resamples);
    try {
      scaling.safety_over_feasibility = slope_ratio(scaling.safety, scaling.feasibility, s_pairs, seed, resamples);
      scaling.intention_over_feasibility =
          slope_ratio(scaling.safety_intention, scaling.feasibility, si_pairs, seed, resamples);
    } catch (const Error& e) {
      report.warnings.push_back(std::string("slope ratios skipped: ") + e.what());
    }
    report.scaling = std::move(scaling);
  } catch (const Error& e) {
    report.warnings.push_back(std::string("scaling regressions skipped: ") + e.what());
  }

  std::vector<DecompositionPoint> decomposition;
  for (const auto& [model, summary] : overall) {
    decomposition.push_back(DecompositionPoint{summary->feasibility.value(), summary->safety_intention.value(),
                                               summary->safety.value()});
  }
  try {
    report.decomposition = decomposition_fit(decomposition);
  } catch (const Error& e) {
    report.warnings.push_back(std::string("decomposition fit skipped: ") + e.what());
  }

  report.difficulty = difficulty_table(records);
  for (const char* attribute : {"plan_length", "safety_effort"}) {
    std::map<std::string, double> values;
    for (const auto& [task, attrs] : attributes) {
      auto v = std::string_view(attribute) == "plan_length" ? attrs.plan_length : attrs.safety_effort;
      if (v) values[task] = *v;
    }
    for (Metric m : {Metric::Feasibility, Metric::Safety, Metric::SafetyIntention}) {
      report.effects.push_back(EffectSize{attribute, m, bucket_effect(*report.difficulty, m, values)});
    }
  }
  return report;
}

} // namespace safeplan
