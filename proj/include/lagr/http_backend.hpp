#pragma once

#include <string>

#include "lagr/oracle.hpp"

namespace lagr {

// Live chat-completion endpoint. The credential is read from an environment
// variable, never from configuration or flags.
struct HttpBackendConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080 or https://host
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4";
  std::string api_key_env = "LAGR_API_KEY";
  int timeout_seconds = 60;
  int max_retries = 3;       // additional attempts after the first
  int backoff_initial_ms = 250;  // doubled per retry
};

class HttpBackend : public TextBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);

  std::string id() const override { return "http:" + cfg_.model; }
  std::string complete(const OracleQuery& q) override;

  const HttpBackendConfig& config() const { return cfg_; }

 private:
  HttpBackendConfig cfg_;
  std::string api_key_;
};

}  // namespace lagr
