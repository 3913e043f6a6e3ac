#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lagr/env_common.hpp"

namespace lagr {

struct CubeSpec {
  int id = 0;
  double edge_cm = 0.0;
  std::string color;
};

struct CubeStackState {
  std::vector<int> stack;  // cube ids, bottom to top
  bool operator==(const CubeStackState&) const = default;
};

// code 0 = pop the top cube, code k >= 1 = place cube k.
struct CubeAction {
  int code = 0;
  static CubeAction pop() { return {0}; }
  static CubeAction place(int id) { return {id}; }
  bool is_pop() const { return code == 0; }
  bool operator==(const CubeAction&) const = default;
};

enum class CubeAcceptance { exact, literal };

struct CubeEnvConfig {
  std::vector<CubeSpec> cubes;
  std::vector<std::vector<int>> target_orders;
  double bonus = 1.0;
  long horizon = 100;
  double delta = 1.0;
  CubeAcceptance acceptance = CubeAcceptance::exact;
};

// The 8-cube set: four red cubes of 5/4/3/2cm and four blue of 10/8/6/2cm.
std::vector<CubeSpec> default_cube_specs();
// First n rows of an 11-cube master table (the 8 defaults extended by three
// green cubes of 12/9/7cm) for stack-size experiments. 2 <= n <= 11.
std::vector<CubeSpec> cube_specs_for_size(int n);
// Orders of strictly non-increasing edge length: the descending-size sort,
// with adjacent equal-size cubes contributing one order per arrangement.
std::vector<std::vector<int>> decreasing_size_targets(
    const std::vector<CubeSpec>& cubes);

CubeEnvConfig make_cube_config(int n);

// Stack environment: E(s) = len(s) * C(s) with C the best per-position match
// against any target order; step reward is the E difference plus a bonus for
// completing a target exactly.
class CubeEnv {
 public:
  using State = CubeStackState;
  using Action = CubeAction;

  explicit CubeEnv(CubeEnvConfig cfg);

  const CubeEnvConfig& config() const { return cfg_; }
  int num_cubes() const { return static_cast<int>(cfg_.cubes.size()); }
  int num_actions() const { return num_cubes() + 1; }
  long horizon() const { return cfg_.horizon; }
  std::string id() const;

  State reset() const { return {}; }
  double evaluate(const State& s) const;
  std::vector<Action> legal_actions(const State& s) const;
  StepOutcome step(const State& s, Action a, State& next) const;
  bool is_solution(const State& candidate) const;
  std::optional<Action> policy_action(const State& solution,
                                      const State& current) const;

  std::string render_state(const State& s) const;
  Parsed<State> parse_state(std::string_view text) const;

  int action_index(Action a) const { return a.code; }
  // Fraction of the target pattern present: stack length over target length.
  double completion_fraction(const State& s) const;
  bool matches_target_prefix(const State& s, std::vector<int>* target) const;

  // Normalized evaluation in [0, 1] used by the logistic secondary reward.
  double eval_fraction(const State& s) const;

 private:
  int match_count(const std::vector<int>& stack,
                  const std::vector<int>& target) const;
  bool is_exact_target(const State& s) const;

  CubeEnvConfig cfg_;
};

char cube_letter(int id);
int cube_id(char letter);

}  // namespace lagr
