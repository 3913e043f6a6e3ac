#include "lagr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lagr {

QueryGating parse_gating(const std::string& s) {
  if (s == "seq") return QueryGating::seq;
  if (s == "always") return QueryGating::always;
  if (s == "never") return QueryGating::never;
  throw std::invalid_argument("unknown gating mode: " + s);
}

const char* gating_name(QueryGating g) {
  switch (g) {
    case QueryGating::seq: return "seq";
    case QueryGating::always: return "always";
    case QueryGating::never: return "never";
  }
  return "unknown";
}

SecondaryRewardMode parse_reward_mode(const std::string& s) {
  if (s == "binary_pm") return SecondaryRewardMode::binary_pm;
  if (s == "binary_01") return SecondaryRewardMode::binary_01;
  if (s == "logistic") return SecondaryRewardMode::logistic;
  throw std::invalid_argument("unknown secondary reward mode: " + s);
}

const char* reward_mode_name(SecondaryRewardMode m) {
  switch (m) {
    case SecondaryRewardMode::binary_pm: return "binary_pm";
    case SecondaryRewardMode::binary_01: return "binary_01";
    case SecondaryRewardMode::logistic: return "logistic";
  }
  return "unknown";
}

double secondary_reward(SecondaryRewardMode mode, bool accepted,
                        double eval_fraction, LogisticRewardParams lp) {
  switch (mode) {
    case SecondaryRewardMode::binary_pm:
      return accepted ? 1.0 : -1.0;
    case SecondaryRewardMode::binary_01:
      return accepted ? 1.0 : 0.0;
    case SecondaryRewardMode::logistic:
      return 1.0 / (1.0 + std::exp(-lp.p1 * (eval_fraction - lp.p2)));
  }
  throw std::invalid_argument("unknown secondary reward mode");
}

double ExperimentAggregate::total_mean_return() const {
  double total = 0.0;
  for (const double r : mean_return) total += r;
  return total;
}

SeriesStat mean_stderr(const std::vector<double>& xs) {
  SeriesStat s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return s;  // single sample: standard error 0
  double ss = 0.0;
  for (const double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  s.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}

ExperimentAggregate aggregate_trials(std::vector<TrialMetrics> trials) {
  if (trials.empty()) throw std::invalid_argument("no trials to aggregate");
  const std::size_t episodes = trials.front().episode_returns.size();
  for (const auto& t : trials) {
    if (t.episode_returns.size() != episodes) {
      throw std::invalid_argument("trials disagree on episode count");
    }
  }
  ExperimentAggregate agg;
  agg.mean_return.resize(episodes);
  agg.stderr_return.resize(episodes);
  std::vector<double> col(trials.size());
  for (std::size_t e = 0; e < episodes; ++e) {
    for (std::size_t t = 0; t < trials.size(); ++t) {
      col[t] = trials[t].episode_returns[e];
    }
    const auto s = mean_stderr(col);
    agg.mean_return[e] = s.mean;
    agg.stderr_return[e] = s.stderr_;
  }
  std::vector<double> q, b, h;
  for (const auto& t : trials) {
    q.push_back(static_cast<double>(t.total_queries));
    b.push_back(static_cast<double>(t.backend_calls));
    h.push_back(static_cast<double>(t.cache_hits));
  }
  agg.queries = mean_stderr(q);
  agg.backend_calls = mean_stderr(b);
  agg.cache_hits = mean_stderr(h);
  agg.trials = std::move(trials);
  return agg;
}

double performance_ratio(const ExperimentAggregate& treatment,
                         const ExperimentAggregate& baseline) {
  if (treatment.mean_return.size() != baseline.mean_return.size()) {
    throw std::invalid_argument("performance ratio needs equal episode counts");
  }
  const double denom = baseline.total_mean_return();
  if (!(denom > 0.0)) {
    throw std::domain_error("baseline total return is not positive");
  }
  return treatment.total_mean_return() / denom;
}

long episodes_to_eval(const TrialMetrics& m, double threshold, long sentinel) {
  for (std::size_t e = 0; e < m.episode_max_eval.size(); ++e) {
    if (m.episode_max_eval[e] >= threshold - 1e-9) {
      return static_cast<long>(e);
    }
  }
  return sentinel;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty set");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace lagr
