#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagr/cube_env.hpp"
#include "lagr/grid_env.hpp"
#include "lagr/prompts.hpp"
#include "lagr/rng.hpp"

namespace lagr {

struct OracleQuery {
  std::string env_id;
  std::string descriptor_id;
  std::string rendered_state;
  std::string prompt;  // full prompt text; only live backends look at it
  double temperature = 0.0;
};

enum class OracleErrorKind { transport, http_status, empty_completion, config };

class OracleBackendError : public std::runtime_error {
 public:
  OracleBackendError(OracleErrorKind kind, std::string message,
                     int http_status = 0, int attempts = 0)
      : std::runtime_error(std::move(message)),
        kind(kind),
        http_status(http_status),
        attempts(attempts) {}

  OracleErrorKind kind;
  int http_status;
  int attempts;
};

// Completion source: scripted stand-in, cached replay, or live HTTP.
class TextBackend {
 public:
  virtual ~TextBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const OracleQuery& q) = 0;
};

struct ScriptedOracleConfig {
  // Minimum completion fraction below which the oracle cannot extrapolate.
  double theta = 0.45;
  // Wrong-answer probability added per unit temperature.
  double kappa_slope = 0.0;
};

// Deterministic language-model stand-in for the stack task. Returns the
// target order when the prompt shows a consistent prefix covering at least
// theta of it (minus a temperature-scaled error coin); otherwise completes
// the observed stack with the remaining cubes in descending id order, which
// never forms a valid target.
class ScriptedCubeBackend : public TextBackend {
 public:
  ScriptedCubeBackend(CubeEnv env, ScriptedOracleConfig cfg, RngStream rng)
      : env_(std::move(env)), cfg_(cfg), rng_(rng) {}

  std::string id() const override { return "scripted"; }
  std::string complete(const OracleQuery& q) override;

 private:
  CubeEnv env_;
  ScriptedOracleConfig cfg_;
  RngStream rng_;
};

// Grid counterpart: the evidence fraction is correctly placed objects over
// target objects; failures return the target shifted one column (merged with
// the observed objects, which the prompts require to be preserved).
class ScriptedGridBackend : public TextBackend {
 public:
  ScriptedGridBackend(GridEnv env, ScriptedOracleConfig cfg, RngStream rng)
      : env_(std::move(env)), cfg_(cfg), rng_(rng) {}

  std::string id() const override { return "scripted"; }
  std::string complete(const OracleQuery& q) override;

 private:
  GridEnv env_;
  ScriptedOracleConfig cfg_;
  RngStream rng_;
};

enum class ParseStatus { ok, malformed, constraint_violation };

const char* parse_status_name(ParseStatus s);

template <typename State>
struct SolutionParse {
  ParseStatus status = ParseStatus::malformed;
  ParseError detail = ParseError::no_structure;
  std::optional<State> state;
  bool ok() const { return status == ParseStatus::ok; }
};

// Environment parse plus the solution-level constraints: a cube solution must
// be a permutation of all cubes, a grid solution exactly W x H binary.
SolutionParse<CubeStackState> parse_solution(const CubeEnv& env,
                                             std::string_view text);
SolutionParse<GridState> parse_solution(const GridEnv& env,
                                        std::string_view text);

template <typename State>
struct OracleResponse {
  std::string raw_text;
  std::optional<State> parsed;
  ParseStatus parse_status = ParseStatus::malformed;
  std::string backend_id;
  bool served_from_cache = false;
  int backend_calls = 0;
};

// Partial target states used by the accuracy benchmark.
CubeStackState partial_target_state(const CubeEnv& env, double fraction,
                                    double* achieved);
GridState partial_target_state(const GridEnv& env, double fraction,
                               double* achieved);

struct AccuracyRow {
  double requested = 0.0;
  double achieved = 0.0;
  double accuracy = 0.0;
  int queries = 0;
  int errors = 0;
};

template <typename Env>
std::vector<AccuracyRow> accuracy_sweep(const Env& env, TextBackend& backend,
                                        const TaskDescriptor& descriptor,
                                        std::span<const double> fractions,
                                        int n_queries, double temperature) {
  if (n_queries < 1) {
    throw std::invalid_argument("accuracy sweep needs n_queries >= 1");
  }
  std::vector<AccuracyRow> rows;
  for (const double requested : fractions) {
    AccuracyRow row;
    row.requested = requested;
    row.queries = n_queries;
    const auto state = partial_target_state(env, requested, &row.achieved);
    OracleQuery q;
    q.env_id = env.id();
    q.descriptor_id = descriptor.id;
    q.rendered_state = env.render_state(state);
    q.prompt = render_prompt(descriptor, q.rendered_state);
    q.temperature = temperature;
    int accepted = 0;
    for (int i = 0; i < n_queries; ++i) {
      try {
        const std::string raw = backend.complete(q);
        const auto parsed = parse_solution(env, raw);
        if (parsed.ok() && env.is_solution(*parsed.state)) ++accepted;
      } catch (const OracleBackendError&) {
        ++row.errors;  // counted as a failure, not an abort
      }
    }
    row.accuracy = static_cast<double>(accepted) / n_queries;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lagr
