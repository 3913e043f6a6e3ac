#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>
#include <type_traits>
#include <vector>

#include "lagr/bandit.hpp"
#include "lagr/cache.hpp"
#include "lagr/cube_env.hpp"
#include "lagr/dqn.hpp"
#include "lagr/metrics.hpp"
#include "lagr/oracle.hpp"
#include "lagr/prompts.hpp"
#include "lagr/tabular_q.hpp"

namespace lagr {

// ---- primary agent adapters ------------------------------------------------

class TabularPrimary {
 public:
  TabularPrimary(int num_actions, double alpha, double gamma)
      : q_(num_actions, alpha, gamma) {}

  template <class Env>
  typename Env::Action select(const Env& env, const typename Env::State& s,
                              const std::vector<typename Env::Action>& legal,
                              double epsilon, RngStream& rng) const {
    std::vector<int> idx;
    idx.reserve(legal.size());
    for (const auto& a : legal) idx.push_back(env.action_index(a));
    const auto values = q_.values(env.render_state(s), idx);
    return legal[select_action(std::span<const double>(values), epsilon, rng)];
  }

  template <class Env>
  void observe(const Env& env, const typename Env::State& s,
               typename Env::Action a, double reward,
               const typename Env::State& next, bool terminal) {
    std::vector<int> legal_next;
    if (!terminal) {
      for (const auto& an : env.legal_actions(next)) {
        legal_next.push_back(env.action_index(an));
      }
    }
    q_.update(env.render_state(s), env.action_index(a), reward,
              env.render_state(next), legal_next, terminal);
  }

  const TabularQ& table() const { return q_; }

 private:
  TabularQ q_;
};

class DqnPrimary {
 public:
  DqnPrimary(std::size_t input_size, std::size_t num_actions,
             const DqnHyperparams& hp, RngStream rng)
      : core_(input_size, num_actions, hp, std::move(rng)) {}

  template <class Env>
  typename Env::Action select(const Env& env, const typename Env::State& s,
                              const std::vector<typename Env::Action>& legal,
                              double epsilon, RngStream& rng) const {
    const auto q = core_.q_values(env.encode(s));
    std::vector<double> values;
    values.reserve(legal.size());
    for (const auto& a : legal) {
      values.push_back(q[static_cast<std::size_t>(env.action_index(a))]);
    }
    return legal[select_action(std::span<const double>(values), epsilon, rng)];
  }

  template <class Env>
  void observe(const Env& env, const typename Env::State& s,
               typename Env::Action a, double reward,
               const typename Env::State& next, bool terminal) {
    core_.remember({env.encode(s), env.action_index(a), reward,
                    env.encode(next), terminal});
    core_.train_step();
  }

  const DqnCore& core() const { return core_; }

 private:
  DqnCore core_;
};

// ---- secondary (query bandit) adapters -------------------------------------

class TabularSecondary {
 public:
  explicit TabularSecondary(double alpha) : bandit_(alpha) {}

  template <class Env>
  int select(const Env& env, const typename Env::State& s, double epsilon,
             RngStream& rng) const {
    return bandit_.select(env.render_state(s), epsilon, rng);
  }

  template <class Env>
  void update(const Env& env, const typename Env::State& s, int arm,
              double reward) {
    bandit_.update(env.render_state(s), arm, reward);
  }

  const TabularBandit& bandit() const { return bandit_; }

 private:
  TabularBandit bandit_;
};

class NetSecondary {
 public:
  NetSecondary(std::size_t input_size, const std::vector<std::size_t>& hidden,
               double learning_rate, RngStream rng)
      : bandit_(input_size, hidden, learning_rate, std::move(rng)) {}

  template <class Env>
  int select(const Env& env, const typename Env::State& s, double epsilon,
             RngStream& rng) const {
    return bandit_.select(env.encode_cells(s), epsilon, rng);
  }

  template <class Env>
  void update(const Env& env, const typename Env::State& s, int arm,
              double reward) {
    bandit_.update(env.encode_cells(s), arm, reward);
  }

  const NetBandit& bandit() const { return bandit_; }

 private:
  NetBandit bandit_;
};

// ---- control loop ----------------------------------------------------------

// One trial of the guided loop: the query bandit decides on positive-reward
// steps whether to ask the oracle for a full solution; an accepted solution
// latches F and the primary follows the diff policy with probability P while
// it keeps learning from every transition.
//
// Factories receive the trial's forked streams so trials stay independent:
//   make_primary(RngStream)   -> Primary
//   make_secondary(RngStream) -> Secondary
//   make_backend(RngStream)   -> std::unique_ptr<TextBackend>
template <class Env, class MakePrimary, class MakeSecondary, class MakeBackend>
TrialMetrics run_trial(const Env& env, const TaskDescriptor& descriptor,
                       const TrialConfig& cfg, std::uint64_t seed,
                       MakePrimary&& make_primary,
                       MakeSecondary&& make_secondary,
                       MakeBackend&& make_backend,
                       ResponseCache* shared_cache = nullptr) {
  if constexpr (std::is_same_v<Env, CubeEnv>) {
    if (cfg.reward_mode == SecondaryRewardMode::logistic) {
      throw std::invalid_argument(
          "logistic secondary reward is grid-normalized; not valid on the "
          "cube environment");
    }
  }
  const auto t0 = std::chrono::steady_clock::now();

  RngStream root = make_rng(seed);
  auto primary = make_primary(root.fork("primary"));
  auto secondary = make_secondary(root.fork("secondary"));
  auto backend = make_backend(root.fork("oracle"));
  RngStream select_rng = root.fork("select");
  RngStream gate_rng = root.fork("gate");
  RngStream cache_rng = root.fork("cache");

  ResponseCache local_cache;
  ResponseCache& cache = shared_cache != nullptr ? *shared_cache : local_cache;

  const long horizon =
      cfg.horizon_override > 0 ? cfg.horizon_override : env.horizon();

  TrialMetrics m;
  bool latched = false;
  typename Env::State solution;

  for (long ep = 0; ep < cfg.episodes; ++ep) {
    typename Env::State s = env.reset();
    double prev_reward = 0.0;  // gate closed at episode start
    double ep_return = 0.0;
    int ep_queries = 0;
    double max_eval = env.eval_fraction(s);
    const double eps_p = cfg.primary_eps.at(ep);
    const double eps_s = cfg.secondary_eps.at(ep);

    for (long h = 0; h < horizon; ++h) {
      if (!latched && cfg.gating != QueryGating::never) {
        const int abar = cfg.gating == QueryGating::always
                             ? kQueryArm
                             : secondary.select(env, s, eps_s, gate_rng);
        const bool gate_open = prev_reward > 0.0;
        if (gate_open) {
          ++m.gate_open_steps;
          if (abar == kQueryArm) {
            // gate soundness check against the raw step reward
            if (!(prev_reward > 0.0)) ++m.gate_violations;
            ++ep_queries;
            ++m.total_queries;

            OracleQuery query;
            query.env_id = env.id();
            query.descriptor_id = descriptor.id;
            query.rendered_state = env.render_state(s);
            query.prompt = render_prompt(descriptor, query.rendered_state);
            query.temperature = cfg.temperature;

            bool accepted = false;
            double eval_fraction = 0.0;
            std::optional<typename Env::State> parsed_state;
            try {
              const auto served = cache.query(*backend, query, cache_rng);
              m.backend_calls += served.backend_calls;
              if (served.from_cache) ++m.cache_hits;
              auto parsed = parse_solution(env, served.raw);
              if (parsed.ok()) {
                parsed_state = std::move(parsed.state);
                eval_fraction = env.eval_fraction(*parsed_state);
                accepted = env.is_solution(*parsed_state);
              }
            } catch (const OracleBackendError&) {
              // transport/parse trouble counts as an incorrect response
              accepted = false;
              eval_fraction = 0.0;
            }
            const double rbar = secondary_reward(cfg.reward_mode, accepted,
                                                 eval_fraction, cfg.logistic);
            if (accepted && !latched) {
              latched = true;
              solution = *parsed_state;
              m.solution_found = true;
              m.found_episode = static_cast<int>(ep);
              m.found_step = static_cast<int>(h);
              m.accepted_solution_text = env.render_state(solution);
            }
            secondary.update(env, s, kQueryArm, rbar);
          } else {
            secondary.update(env, s, kNoQueryArm, 0.0);
          }
        }
      }

      const auto legal = env.legal_actions(s);
      typename Env::Action a = primary.select(env, s, legal, eps_p, select_rng);
      if (latched) {
        const double p = cfg.follow_probability;
        const bool follow =
            p >= 1.0 ? true : (p <= 0.0 ? false : select_rng.uniform() < p);
        if (follow) {
          if (const auto pa = env.policy_action(solution, s)) a = *pa;
        }
      }

      typename Env::State next;
      const StepOutcome out = env.step(s, a, next);
      primary.observe(env, s, a, out.reward, next, out.done);
      if (cfg.record_trajectory) {
        m.trajectory.push_back(
            {env.render_state(s), env.action_index(a), out.reward, out.done});
      }
      ep_return += out.reward;
      prev_reward = out.reward;
      max_eval = std::max(max_eval, env.eval_fraction(next));
      s = std::move(next);
      if (out.done) break;
    }

    m.episode_returns.push_back(ep_return);
    m.episode_queries.push_back(ep_queries);
    m.episode_max_eval.push_back(max_eval);
  }

  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return m;
}

// Plain RL loop with no oracle machinery at all; the purity reference for
// gating=never runs.
template <class Env, class MakePrimary>
TrialMetrics baseline_trial(const Env& env, const TrialConfig& cfg,
                            std::uint64_t seed, MakePrimary&& make_primary) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream root = make_rng(seed);
  auto primary = make_primary(root.fork("primary"));
  RngStream select_rng = root.fork("select");

  const long horizon =
      cfg.horizon_override > 0 ? cfg.horizon_override : env.horizon();
  TrialMetrics m;
  for (long ep = 0; ep < cfg.episodes; ++ep) {
    typename Env::State s = env.reset();
    double ep_return = 0.0;
    double max_eval = env.eval_fraction(s);
    const double eps_p = cfg.primary_eps.at(ep);
    for (long h = 0; h < horizon; ++h) {
      const auto legal = env.legal_actions(s);
      const auto a = primary.select(env, s, legal, eps_p, select_rng);
      typename Env::State next;
      const StepOutcome out = env.step(s, a, next);
      primary.observe(env, s, a, out.reward, next, out.done);
      if (cfg.record_trajectory) {
        m.trajectory.push_back(
            {env.render_state(s), env.action_index(a), out.reward, out.done});
      }
      ep_return += out.reward;
      max_eval = std::max(max_eval, env.eval_fraction(next));
      s = std::move(next);
      if (out.done) break;
    }
    m.episode_returns.push_back(ep_return);
    m.episode_queries.push_back(0);
    m.episode_max_eval.push_back(max_eval);
  }
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return m;
}

// Runs one trial per seed, a bounded number at a time; results keep seed
// order so aggregation is deterministic.
template <class MakeTrial>
std::vector<TrialMetrics> run_trials(const std::vector<std::uint64_t>& seeds,
                                     MakeTrial&& make_trial,
                                     unsigned max_threads = 0) {
  std::vector<TrialMetrics> results(seeds.size());
  unsigned workers = max_threads != 0 ? max_threads
                                      : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(seeds.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      results[i] = make_trial(seeds[i]);
    }
    return results;
  }
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= seeds.size()) return;
        try {
          results[i] = make_trial(seeds[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace lagr
