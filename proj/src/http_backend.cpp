#include "lagr/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace lagr {

using nlohmann::json;

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.base_url.empty()) {
    throw OracleBackendError(OracleErrorKind::config, "missing endpoint url");
  }
  if (const char* key = std::getenv(cfg_.api_key_env.c_str())) {
    api_key_ = key;
  }
}

std::string HttpBackend::complete(const OracleQuery& q) {
  json body{
      {"model", cfg_.model},
      {"temperature", q.temperature},
      {"messages", json::array({json{{"role", "user"}, {"content", q.prompt}}})},
  };
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }

  std::string last_error = "no attempt made";
  int last_status = 0;
  int attempts = 0;
  int backoff_ms = cfg_.backoff_initial_ms;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    ++attempts;
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    auto res = client.Post(cfg_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    if (res->status == 429 || res->status >= 500) {
      last_error = "retryable status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw OracleBackendError(OracleErrorKind::http_status,
                               "endpoint returned status " +
                                   std::to_string(res->status),
                               res->status, attempts);
    }
    std::string content;
    try {
      const json reply = json::parse(res->body);
      content = reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
    } catch (const json::exception& e) {
      throw OracleBackendError(OracleErrorKind::empty_completion,
                               std::string("unparseable completion body: ") +
                                   e.what(),
                               res->status, attempts);
    }
    if (content.empty()) {
      throw OracleBackendError(OracleErrorKind::empty_completion,
                               "endpoint returned an empty completion",
                               res->status, attempts);
    }
    return content;
  }
  if (last_status == 429 || last_status >= 500) {
    throw OracleBackendError(OracleErrorKind::http_status,
                             "gave up after " + std::to_string(attempts) +
                                 " attempts: " + last_error,
                             last_status, attempts);
  }
  throw OracleBackendError(OracleErrorKind::transport,
                           "gave up after " + std::to_string(attempts) +
                               " attempts: " + last_error,
                           0, attempts);
}

}  // namespace lagr
