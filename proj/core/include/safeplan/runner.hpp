#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safeplan/bundle.hpp"
#include "safeplan/plan.hpp"

namespace safeplan {

struct ProviderConfig {
  enum class Kind { Directory, Command, Http };
  Kind kind = Kind::Directory;

  // directory: plans are read from <directory>/<task>.txt
  std::filesystem::path directory;
  // command: run through /bin/sh with the prompt on stdin
  std::string command;
  // http: OpenAI-compatible endpoint, e.g. http://localhost:8000/v1
  std::string base_url;
  std::string model;
  std::string token_env;  // name of the variable holding the bearer token
  double temperature = 0.0;
  std::map<std::string, std::string> extra_params;  // passed through verbatim (JSON values)

  double timeout_s = 120.0;
  int max_retries = 3;
  double backoff_s = 0.5;  // first retry delay, doubled each time
  std::optional<std::filesystem::path> prompt_template;
};

std::string_view to_string(ProviderConfig::Kind kind);

/// "directory:<path>", "command:<shell command>" or "http:<base url>".
/// Errors: InvalidArgument.
ProviderConfig parse_provider(std::string_view spec);

/// One RawPlanText per bundle, in bundle order, tagged with `model_id`.
/// Prompts are audited before they leave the process; a failed audit, a
/// timeout, an HTTP error or a missing plan file is recorded in
/// RawPlanText::error with empty text and never aborts the batch.
/// `parallel` bounds the number of tasks in flight.
std::vector<RawPlanText> collect_plans(const std::vector<TaskBundle>& bundles, const ProviderConfig& provider,
                                       const std::string& model_id, std::size_t parallel = 1);

/// Runs `fn(i)` for i in [0, n) on at most `width` threads.
template <typename F>
void parallel_for(std::size_t n, std::size_t width, F&& fn);

} // namespace safeplan

#include "safeplan/detail/parallel.hpp"
