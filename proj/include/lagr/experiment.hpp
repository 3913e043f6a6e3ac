#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lagr/metrics.hpp"

namespace lagr {

// Bad configuration (unknown keys, invalid values, unsupported combinations).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliOverrides {
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::string> backend;
  std::optional<std::string> cache_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> gating;  // applied to every variant
  std::optional<double> temperature;
};

struct ExperimentOutcome {
  std::string name;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> variant_labels;
  std::map<std::string, ExperimentAggregate> aggregates;
  std::vector<std::pair<std::string, double>> ratios;
  nlohmann::json resolved_config;
};

// Load + validate an experiment file; unknown keys are rejected with an
// error naming the key.
nlohmann::json load_experiment_json(const std::string& path);
void validate_experiment_json(const nlohmann::json& doc);
void apply_overrides(nlohmann::json& doc, const CliOverrides& overrides);

// Run every variant over the seed list.
ExperimentOutcome run_experiment_doc(const nlohmann::json& doc);

}  // namespace lagr
