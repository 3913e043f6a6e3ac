#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "lagr/schedule.hpp"

namespace lagr {

enum class QueryGating { seq, always, never };
enum class SecondaryRewardMode { binary_pm, binary_01, logistic };

QueryGating parse_gating(const std::string& s);
const char* gating_name(QueryGating g);
SecondaryRewardMode parse_reward_mode(const std::string& s);
const char* reward_mode_name(SecondaryRewardMode m);

struct LogisticRewardParams {
  double p1 = 20.0;
  double p2 = 0.9;
};

// Reward for the query bandit given the evaluated oracle response.
// eval_fraction is the environment evaluation normalized to [0, 1] (matched
// cells over all cells for grids); a parse failure passes 0.
double secondary_reward(SecondaryRewardMode mode, bool accepted,
                        double eval_fraction, LogisticRewardParams lp = {});

struct TrialConfig {
  long episodes = 100;
  long horizon_override = 0;  // 0: the environment's horizon
  double follow_probability = 1.0;
  QueryGating gating = QueryGating::seq;
  SecondaryRewardMode reward_mode = SecondaryRewardMode::binary_pm;
  LogisticRewardParams logistic;
  EpsilonSchedule primary_eps = EpsilonSchedule::linear(1.0, 0.05, 80.0);
  EpsilonSchedule secondary_eps = EpsilonSchedule::linear(1.0, 0.05, 80.0);
  double temperature = 0.0;
  bool record_trajectory = false;
};

struct TrajectoryStep {
  std::string state;
  int action = 0;
  double reward = 0.0;
  bool done = false;

  bool operator==(const TrajectoryStep& o) const {
    return state == o.state && action == o.action && done == o.done &&
           std::bit_cast<std::uint64_t>(reward) ==
               std::bit_cast<std::uint64_t>(o.reward);
  }
};

struct TrialMetrics {
  std::vector<double> episode_returns;
  std::vector<double> episode_max_eval;  // normalized evaluation peak
  std::vector<int> episode_queries;      // gate-open query decisions

  long total_queries = 0;     // gate-open query decisions (pre-cache)
  long backend_calls = 0;     // actual backend completions
  long cache_hits = 0;
  long gate_open_steps = 0;
  long gate_violations = 0;   // queries issued outside an open gate (must stay 0)

  bool solution_found = false;
  int found_episode = -1;
  int found_step = -1;
  std::string accepted_solution_text;

  double wall_seconds = 0.0;
  std::vector<TrajectoryStep> trajectory;
};

struct SeriesStat {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct ExperimentAggregate {
  std::vector<double> mean_return;    // per episode, across seeds
  std::vector<double> stderr_return;
  SeriesStat queries;        // gate-open decisions per trial
  SeriesStat backend_calls;
  SeriesStat cache_hits;
  std::vector<TrialMetrics> trials;

  double total_mean_return() const;
};

SeriesStat mean_stderr(const std::vector<double>& xs);
ExperimentAggregate aggregate_trials(std::vector<TrialMetrics> trials);

// Sum of per-episode mean returns of `treatment` over the same sum for
// `baseline`. Throws when the baseline total is not positive.
double performance_ratio(const ExperimentAggregate& treatment,
                         const ExperimentAggregate& baseline);

// First episode whose peak evaluation reached `threshold`; `sentinel` when
// no episode did.
long episodes_to_eval(const TrialMetrics& m, double threshold, long sentinel);
double median(std::vector<double> xs);

}  // namespace lagr
