#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "lagr/grid_env.hpp"
#include "lagr/http_backend.hpp"

using namespace lagr;
using nlohmann::json;

namespace {

std::string chat_reply(const std::string& content) {
  return json{{"choices",
               json::array({json{{"message", json{{"role", "assistant"},
                                                  {"content", content}}}}})}}
      .dump();
}

struct TestServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit TestServer(httplib::Server::Handler handler) {
    server.Post("/v1/chat/completions", std::move(handler));
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~TestServer() {
    server.stop();
    thread.join();
  }

  HttpBackendConfig config() const {
    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.max_retries = 2;
    cfg.backoff_initial_ms = 1;
    cfg.timeout_seconds = 5;
    return cfg;
  }
};

OracleQuery sample_query() {
  OracleQuery q;
  q.env_id = "image10x10-oval10";
  q.descriptor_id = "image";
  q.rendered_state = "[[0,0],[0,0]]";
  q.prompt = "prompt body with state [[0,0],[0,0]]";
  q.temperature = 0.25;
  return q;
}

}  // namespace

TEST_CASE("a well-formed completion round-trips") {
  std::string seen_body;
  TestServer ts([&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    res.set_content(chat_reply("[[0,1],[1,0]]"), "application/json");
  });
  HttpBackend backend(ts.config());
  const std::string text = backend.complete(sample_query());
  CHECK(text == "[[0,1],[1,0]]");

  const json body = json::parse(seen_body);
  CHECK(body.at("model").get<std::string>() == "gpt-4");
  CHECK(body.at("temperature").get<double>() == 0.25);
  CHECK(body.at("messages").at(0).at("content").get<std::string>() ==
        sample_query().prompt);
}

TEST_CASE("an endpoint echoing a fixed matrix parses as ok") {
  const lagr::GridEnv env(lagr::make_image_config("oval10"));
  const std::string matrix = env.render_cells(env.config().target.cells);
  TestServer ts([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_reply(matrix), "application/json");
  });
  HttpBackend backend(ts.config());
  const std::string text = backend.complete(sample_query());
  const auto parsed = lagr::parse_solution(env, text);
  CHECK(parsed.status == lagr::ParseStatus::ok);
  REQUIRE(parsed.state.has_value());
  CHECK(env.is_solution(*parsed.state));
}

TEST_CASE("rate limits are retried with eventual success") {
  std::atomic<int> hits{0};
  TestServer ts([&](const httplib::Request&, httplib::Response& res) {
    const int n = ++hits;
    if (n <= 2) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
      return;
    }
    res.set_content(chat_reply("ok"), "application/json");
  });
  HttpBackend backend(ts.config());
  CHECK(backend.complete(sample_query()) == "ok");
  CHECK(hits.load() == 3);
}

TEST_CASE("persistent rate limiting fails after the retry budget") {
  std::atomic<int> hits{0};
  TestServer ts([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 429;
  });
  HttpBackend backend(ts.config());
  try {
    backend.complete(sample_query());
    FAIL("expected an error");
  } catch (const OracleBackendError& e) {
    CHECK(e.kind == OracleErrorKind::http_status);
    CHECK(e.attempts == 3);  // initial try + 2 retries
  }
  CHECK(hits.load() == 3);
}

TEST_CASE("non-retryable statuses fail immediately") {
  std::atomic<int> hits{0};
  TestServer ts([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 404;
  });
  HttpBackend backend(ts.config());
  try {
    backend.complete(sample_query());
    FAIL("expected an error");
  } catch (const OracleBackendError& e) {
    CHECK(e.kind == OracleErrorKind::http_status);
    CHECK(e.http_status == 404);
  }
  CHECK(hits.load() == 1);
}

TEST_CASE("empty completions are a distinct error") {
  TestServer ts([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_reply(""), "application/json");
  });
  HttpBackend backend(ts.config());
  try {
    backend.complete(sample_query());
    FAIL("expected an error");
  } catch (const OracleBackendError& e) {
    CHECK(e.kind == OracleErrorKind::empty_completion);
  }
}

TEST_CASE("an unreachable endpoint errors after retries without crashing") {
  HttpBackendConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";  // nothing listens here
  cfg.max_retries = 1;
  cfg.backoff_initial_ms = 1;
  cfg.timeout_seconds = 1;
  HttpBackend backend(cfg);
  try {
    backend.complete(sample_query());
    FAIL("expected an error");
  } catch (const OracleBackendError& e) {
    CHECK(e.kind == OracleErrorKind::transport);
    CHECK(e.attempts == 2);
  }
}

TEST_CASE("a missing endpoint url is a configuration error") {
  HttpBackendConfig cfg;
  CHECK_THROWS_AS(HttpBackend{cfg}, OracleBackendError);
}
