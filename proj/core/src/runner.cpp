#include "safeplan/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "file_util.hpp"
#include "httplib.h"
#include "json.hpp"
#include "safeplan/error.hpp"
#include "safeplan/prompt.hpp"

namespace safeplan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ProviderConfig::Kind kind) {
  switch (kind) {
    case ProviderConfig::Kind::Directory: return "directory";
    case ProviderConfig::Kind::Command: return "command";
    case ProviderConfig::Kind::Http: return "http";
  }
  return "directory";
}

ProviderConfig parse_provider(std::string_view spec) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos || colon + 1 == spec.size()) {
    throw Error(ErrorCode::InvalidArgument, "provider must be directory:<path>, command:<cmd> or http:<url>");
  }
  auto kind = spec.substr(0, colon);
  auto value = std::string(spec.substr(colon + 1));
  ProviderConfig p;
  if (kind == "directory") {
    p.kind = ProviderConfig::Kind::Directory;
    p.directory = value;
  } else if (kind == "command") {
    p.kind = ProviderConfig::Kind::Command;
    p.command = value;
  } else if (kind == "http") {
    p.kind = ProviderConfig::Kind::Http;
    p.base_url = value;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown provider kind '" + std::string(kind) + "'");
  }
  return p;
}

namespace {

/// Runs `command` under /bin/sh with `input` on stdin and returns stdout.
std::string run_command(const std::string& command, const std::string& input, double timeout_s) {
  char path[] = "/tmp/safeplan-prompt-XXXXXX";
  int in_fd = mkstemp(path);
  if (in_fd < 0) throw Error(ErrorCode::IoError, "cannot create prompt temp file");
  std::size_t written = 0;
  while (written < input.size()) {
    auto n = ::write(in_fd, input.data() + written, input.size() - written);
    if (n <= 0) {
      ::close(in_fd);
      ::unlink(path);
      throw Error(ErrorCode::IoError, "cannot write prompt temp file");
    }
    written += static_cast<std::size_t>(n);
  }
  ::lseek(in_fd, 0, SEEK_SET);
  ::unlink(path);

  int out[2];
  if (::pipe(out) != 0) {
    ::close(in_fd);
    throw Error(ErrorCode::IoError, "pipe failed");
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(in_fd);
    ::close(out[0]);
    ::close(out[1]);
    throw Error(ErrorCode::IoError, "fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_fd, STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::close(in_fd);
    ::close(out[0]);
    ::close(out[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_fd);
  ::close(out[1]);

  std::string result;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  bool timed_out = false;
  char buf[4096];
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out[0], POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    auto n = ::read(out[0], buf, sizeof buf);
    if (n <= 0) break;
    result.append(buf, static_cast<std::size_t>(n));
  }
  ::close(out[0]);
  if (timed_out) ::kill(-pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (timed_out) throw Error(ErrorCode::ProviderTimeout, "command exceeded " + std::to_string(timeout_s) + " s");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::IoError, "command exited with status " +
                                                  std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }
  return result;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix + /chat/completions
};

Endpoint split_url(const std::string& base) {
  auto scheme = base.find("://");
  auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = base.find('/', host_start);
  Endpoint e;
  e.origin = slash == std::string::npos ? base : base.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : base.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix + "/chat/completions";
  return e;
}

std::string call_http(const ProviderConfig& p, const std::string& prompt) {
  auto endpoint = split_url(p.base_url);
  httplib::Client client(endpoint.origin);
  auto secs = static_cast<time_t>(p.timeout_s);
  auto usecs = static_cast<time_t>((p.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (!p.token_env.empty()) {
    if (const char* token = std::getenv(p.token_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  json body{{"model", p.model},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", p.temperature}};
  for (const auto& [k, v] : p.extra_params) {
    body[k] = json::parse(v, nullptr, false);
    if (body[k].is_discarded()) body[k] = v;
  }
  auto payload = body.dump();

  std::string last_error;
  ErrorCode last_code = ErrorCode::ProviderHttpError;
  double delay = p.backoff_s;
  for (int attempt = 0; attempt <= p.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      delay *= 2;
    }
    auto res = client.Post(endpoint.path, headers, payload, "application/json");
    if (!res) {
      auto err = res.error();
      last_code = err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout
                      ? ErrorCode::ProviderTimeout
                      : ErrorCode::ProviderHttpError;
      last_error = "request failed: " + httplib::to_string(err);
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_code = ErrorCode::ProviderHttpError;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw Error(ErrorCode::ProviderHttpError, "HTTP " + std::to_string(res->status));
    auto reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw Error(ErrorCode::ProviderHttpError, "response is not JSON");
    try {
      const auto& content = reply.at("choices").at(0).at("message").at("content");
      return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::ProviderHttpError, "response has no choices[0].message.content");
    }
  }
  throw Error(last_code, last_error + " after " + std::to_string(p.max_retries + 1) + " attempts");
}

} // namespace

std::vector<RawPlanText> collect_plans(const std::vector<TaskBundle>& bundles, const ProviderConfig& provider,
                                       const std::string& model_id, std::size_t parallel) {
  std::optional<std::string> prompt_template;
  if (provider.prompt_template) prompt_template = detail::read_file(*provider.prompt_template);

  std::vector<RawPlanText> out(bundles.size());
  parallel_for(bundles.size(), parallel, [&](std::size_t i) {
    const auto& bundle = bundles[i];
    RawPlanText& raw = out[i];
    raw.model_id = model_id;
    raw.task_id = bundle.id;
    try {
      if (provider.kind == ProviderConfig::Kind::Directory) {
        auto path = provider.directory / (bundle.id + ".txt");
        auto text = detail::read_file_if_exists(path);
        if (!text) throw Error(ErrorCode::MissingPlanFile, "no plan file " + path.string());
        raw.text = std::move(*text);
        return;
      }
      auto prompt = prompt_template ? render_prompt(bundle, *prompt_template) : render_prompt(bundle);
      auto audit = audit_prompt(prompt, bundle);
      if (!audit.passed) {
        std::string leaked;
        for (const auto& t : audit.leaked_tokens) leaked += (leaked.empty() ? "" : ", ") + t;
        throw Error(ErrorCode::PromptAuditFailed, "prompt mentions danger-only tokens: " + leaked);
      }
      raw.text = provider.kind == ProviderConfig::Kind::Command ? run_command(provider.command, prompt, provider.timeout_s)
                                                                 : call_http(provider, prompt);
    } catch (const Error& e) {
      raw.text.clear();
      raw.error = e.what();
    }
  });
  return out;
}

} // namespace safeplan
