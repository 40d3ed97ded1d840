#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "check_error.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"
#include "json.hpp"
#include "safeplan/runner.hpp"

using namespace safeplan;
using testing_support::load_fixture;
using testing_support::TempDir;
using nlohmann::json;

namespace {

/// OpenAI-style stub: answers with `reply`, failing the first `failures`
/// requests with 503.
class StubServer {
 public:
  StubServer(std::string reply, int failures) : reply_(std::move(reply)), failures_(failures) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        bodies_.push_back(req.body);
        auth_ = req.get_header_value("Authorization");
      }
      if (calls_++ < failures_) {
        res.status = 503;
        return;
      }
      json body{{"choices", json::array({json{{"message", json{{"role", "assistant"}, {"content", reply_}}}}})}};
      res.set_content(body.dump(), "application/json");
    });
    server_.Post("/broken/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.status = 404;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& prefix = "/v1") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }
  int calls() const { return calls_; }
  std::vector<std::string> bodies() {
    std::lock_guard<std::mutex> lock(mutex_);
    return bodies_;
  }
  std::string auth() {
    std::lock_guard<std::mutex> lock(mutex_);
    return auth_;
  }

 private:
  httplib::Server server_;
  std::string reply_;
  int failures_;
  std::atomic<int> calls_{0};
  int port_ = 0;
  std::thread thread_;
  std::mutex mutex_;
  std::vector<std::string> bodies_;
  std::string auth_;
};

} // namespace

TEST_SUITE("runner") {

TEST_CASE("provider specs") {
  auto d = parse_provider("directory:plans/m");
  CHECK(d.kind == ProviderConfig::Kind::Directory);
  CHECK(d.directory == "plans/m");
  auto c = parse_provider("command:python3 x.py --flag a:b");
  CHECK(c.kind == ProviderConfig::Kind::Command);
  CHECK(c.command == "python3 x.py --flag a:b");
  auto h = parse_provider("http:http://localhost:8000/v1");
  CHECK(h.base_url == "http://localhost:8000/v1");
  CHECK(h.temperature == 0.0);
  CHECK(to_string(h.kind) == "http");
  CHECK_ERROR_CODE(parse_provider("ftp:x"), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(parse_provider("directory:"), ErrorCode::InvalidArgument);
  CHECK_ERROR_CODE(parse_provider("plans"), ErrorCode::InvalidArgument);
}

TEST_CASE("directory provider") {
  TempDir tmp("dir");
  std::ofstream(tmp.path() / "knife_child.txt") << "MOVE_TO(table)\n";
  std::vector<TaskBundle> bundles = {load_fixture("knife_child"), load_fixture("hot_iron")};
  auto p = parse_provider("directory:" + tmp.path().string());
  auto raws = collect_plans(bundles, p, "m", 2);
  REQUIRE(raws.size() == 2);
  CHECK(raws[0].text == "MOVE_TO(table)\n");
  CHECK(raws[0].model_id == "m");
  CHECK(raws[1].task_id == "hot_iron");
  REQUIRE(raws[1].error.has_value());
  CHECK(raws[1].error->rfind("MissingPlanFile", 0) == 0);
}

TEST_CASE("command provider gets the prompt on stdin") {
  std::vector<TaskBundle> bundles = {load_fixture("knife_child")};
  auto p = parse_provider("command:grep -c 'Available actions' ; echo 'MOVE_TO(table)'");
  auto raws = collect_plans(bundles, p, "m");
  CHECK(raws[0].text == "1\nMOVE_TO(table)\n");
  CHECK_FALSE(raws[0].error.has_value());

  auto failing = parse_provider("command:exit 4");
  auto bad = collect_plans(bundles, failing, "m");
  REQUIRE(bad[0].error.has_value());
  CHECK(bad[0].error->rfind("IoError", 0) == 0);
  CHECK(bad[0].text.empty());
}

TEST_CASE("command provider timeout") {
  std::vector<TaskBundle> bundles = {load_fixture("knife_child")};
  auto p = parse_provider("command:sleep 10");
  p.timeout_s = 0.3;
  auto start = std::chrono::steady_clock::now();
  auto raws = collect_plans(bundles, p, "m");
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(raws[0].error.has_value());
  CHECK(raws[0].error->rfind("ProviderTimeout", 0) == 0);
  CHECK(elapsed < 5.0);
}

TEST_CASE("leaky templates never reach the provider") {
  TempDir tmp("tmpl");
  std::ofstream(tmp.path() / "t.txt") << "{domain}\nAvoid any danger.\n";
  std::vector<TaskBundle> bundles = {load_fixture("knife_child")};
  auto p = parse_provider("command:touch " + (tmp.path() / "called").string());
  p.prompt_template = tmp.path() / "t.txt";
  auto raws = collect_plans(bundles, p, "m");
  REQUIRE(raws[0].error.has_value());
  CHECK(raws[0].error->rfind("PromptAuditFailed", 0) == 0);
  CHECK_FALSE(std::filesystem::exists(tmp.path() / "called"));
}

TEST_CASE("http provider retries and sends the configured request") {
  StubServer server("MOVE_TO(table)\nPLACE_ON(knife, table)", 2);
  ::setenv("SAFEPLAN_TEST_TOKEN", "sekret", 1);
  auto p = parse_provider("http:" + server.url());
  p.model = "stub-model";
  p.token_env = "SAFEPLAN_TEST_TOKEN";
  p.backoff_s = 0.01;
  p.max_retries = 3;
  p.extra_params["top_p"] = "0.5";
  std::vector<TaskBundle> bundles = {load_fixture("knife_child")};
  auto raws = collect_plans(bundles, p, "stub");
  CHECK_FALSE(raws[0].error.has_value());
  CHECK(raws[0].text == "MOVE_TO(table)\nPLACE_ON(knife, table)");
  CHECK(server.calls() == 3);
  CHECK(server.auth() == "Bearer sekret");
  auto body = json::parse(server.bodies().back());
  CHECK(body["model"] == "stub-model");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["top_p"] == 0.5);
  CHECK(body["messages"][0]["role"] == "user");
}

TEST_CASE("http provider gives up after the retry budget") {
  StubServer server("x", 100);
  auto p = parse_provider("http:" + server.url());
  p.backoff_s = 0.01;
  p.max_retries = 2;
  auto raws = collect_plans({load_fixture("knife_child")}, p, "stub");
  REQUIRE(raws[0].error.has_value());
  CHECK(raws[0].error->rfind("ProviderHttpError", 0) == 0);
  CHECK(server.calls() == 3);

  auto missing = parse_provider("http:" + server.url("/broken"));
  missing.backoff_s = 0.01;
  auto r = collect_plans({load_fixture("knife_child")}, missing, "stub");
  REQUIRE(r[0].error.has_value());
  CHECK(r[0].error->find("HTTP 404") != std::string::npos);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

}
