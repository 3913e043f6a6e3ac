#include <doctest.h>

#include <cmath>
#include <memory>

#include "lagr/grid_env.hpp"
#include "lagr/orchestrator.hpp"

using namespace lagr;

namespace {

CubeEnv cube8() { return CubeEnv(make_cube_config(8)); }

TrialConfig cube_cfg(long episodes, QueryGating gating, double tau = 0.0) {
  TrialConfig cfg;
  cfg.episodes = episodes;
  cfg.gating = gating;
  cfg.reward_mode = SecondaryRewardMode::binary_pm;
  cfg.temperature = tau;
  cfg.primary_eps = EpsilonSchedule::linear(1.0, 0.05, 0.8 * episodes);
  cfg.secondary_eps = EpsilonSchedule::linear(1.0, 0.05, 0.8 * episodes);
  return cfg;
}

auto cube_primary_factory(const CubeEnv& env) {
  return [&env](RngStream) {
    return TabularPrimary(env.num_actions(), 0.1, 0.95);
  };
}

auto cube_secondary_factory() {
  return [](RngStream) { return TabularSecondary(0.1); };
}

auto cube_backend_factory(const CubeEnv& env, double theta, double kappa) {
  return [&env, theta, kappa](RngStream rng) -> std::unique_ptr<TextBackend> {
    return std::make_unique<ScriptedCubeBackend>(
        env, ScriptedOracleConfig{theta, kappa}, rng);
  };
}

}  // namespace

TEST_CASE("secondary rewards match the three modes") {
  CHECK(secondary_reward(SecondaryRewardMode::binary_pm, true, 1.0) == 1.0);
  CHECK(secondary_reward(SecondaryRewardMode::binary_pm, false, 0.3) == -1.0);
  CHECK(secondary_reward(SecondaryRewardMode::binary_01, true, 1.0) == 1.0);
  CHECK(secondary_reward(SecondaryRewardMode::binary_01, false, 0.3) == 0.0);

  // 90 matching cells of 100: the exponent is exactly zero
  CHECK(secondary_reward(SecondaryRewardMode::logistic, false, 0.90) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(secondary_reward(SecondaryRewardMode::logistic, true, 1.0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-6));
  // a parse failure passes evaluation 0
  CHECK(secondary_reward(SecondaryRewardMode::logistic, false, 0.0) < 1e-7);
}

TEST_CASE("aggregation: stderr of one seed is zero, of {1,3} is one") {
  CHECK(mean_stderr({5.0}).mean == 5.0);
  CHECK(mean_stderr({5.0}).stderr_ == 0.0);
  const auto s = mean_stderr({1.0, 3.0});
  CHECK(s.mean == 2.0);
  CHECK(s.stderr_ == doctest::Approx(1.0));

  TrialMetrics a, b;
  a.episode_returns = {1.0, 2.0};
  b.episode_returns = {3.0, 0.0};
  const auto agg1 = aggregate_trials({a, b});
  const auto agg2 = aggregate_trials({b, a});  // permutation invariance
  CHECK(agg1.mean_return == agg2.mean_return);
  CHECK(agg1.stderr_return == agg2.stderr_return);
  CHECK(agg1.mean_return[0] == 2.0);
}

TEST_CASE("performance ratio divides total mean returns") {
  TrialMetrics a, b;
  a.episode_returns = {64.0, 64.0};
  b.episode_returns = {50.0, 50.0};
  const auto lagr_agg = aggregate_trials({a});
  const auto base_agg = aggregate_trials({b});
  CHECK(performance_ratio(lagr_agg, lagr_agg) == 1.0);
  CHECK(performance_ratio(lagr_agg, base_agg) == doctest::Approx(1.28));

  TrialMetrics z;
  z.episode_returns = {0.0, 0.0};
  const auto zero_agg = aggregate_trials({z});
  CHECK_THROWS_AS(performance_ratio(lagr_agg, zero_agg), std::domain_error);
}

TEST_CASE("gating never issues no queries and touches no oracle state") {
  const auto env = cube8();
  const auto cfg = cube_cfg(20, QueryGating::never);
  const auto m = run_trial(env, cube_descriptor(env.config().cubes), cfg, 3,
                           cube_primary_factory(env), cube_secondary_factory(),
                           cube_backend_factory(env, 0.45, 0.0));
  CHECK(m.total_queries == 0);
  CHECK(m.backend_calls == 0);
  CHECK(m.cache_hits == 0);
  CHECK_FALSE(m.solution_found);
  CHECK(m.gate_violations == 0);
}

TEST_CASE("one episode of one step performs exactly one primary update") {
  const auto env = cube8();
  auto cfg = cube_cfg(1, QueryGating::seq);
  cfg.horizon_override = 1;
  cfg.record_trajectory = true;
  const auto m = run_trial(env, cube_descriptor(env.config().cubes), cfg, 5,
                           cube_primary_factory(env), cube_secondary_factory(),
                           cube_backend_factory(env, 0.45, 0.0));
  CHECK(m.trajectory.size() == 1);
  CHECK(m.episode_returns.size() == 1);
  CHECK(m.total_queries == 0);  // the gate never opens on a first step
}

TEST_CASE("always-gating latches the solution and follows it afterward") {
  const auto env = cube8();
  const auto cfg = cube_cfg(150, QueryGating::always);
  const auto m = run_trial(env, cube_descriptor(env.config().cubes), cfg, 11,
                           cube_primary_factory(env), cube_secondary_factory(),
                           cube_backend_factory(env, 0.45, 0.0));
  REQUIRE(m.solution_found);
  CHECK(m.found_episode >= 0);
  CHECK(m.gate_violations == 0);
  CHECK(m.total_queries > 0);
  // queries stop once F is latched
  for (std::size_t ep = static_cast<std::size_t>(m.found_episode) + 1;
       ep < m.episode_queries.size(); ++ep) {
    CHECK(m.episode_queries[ep] == 0);
  }
  // with P=1 the agent replays the accepted order: empty stack to the full
  // target scores E(final) + bonus = 65 per episode
  CHECK(m.episode_returns.back() == 65.0);
  // the accepted solution text passes the environment acceptance test
  const auto parsed = env.parse_state(m.accepted_solution_text);
  REQUIRE(parsed.ok());
  CHECK(env.is_solution(*parsed.value));
}

TEST_CASE("seq issues at most as many queries as always under paired seeds") {
  const auto env = cube8();
  for (const std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const auto seq =
        run_trial(env, cube_descriptor(env.config().cubes),
                  cube_cfg(80, QueryGating::seq, 1.0), seed,
                  cube_primary_factory(env), cube_secondary_factory(),
                  cube_backend_factory(env, 0.45, 0.3));
    const auto always =
        run_trial(env, cube_descriptor(env.config().cubes),
                  cube_cfg(80, QueryGating::always, 1.0), seed,
                  cube_primary_factory(env), cube_secondary_factory(),
                  cube_backend_factory(env, 0.45, 0.3));
    CHECK(seq.total_queries <= always.total_queries);
    CHECK(seq.gate_violations == 0);
    CHECK(always.gate_violations == 0);
  }
}

TEST_CASE("cache hits accumulate for repeated query states") {
  const auto env = cube8();
  const auto m = run_trial(env, cube_descriptor(env.config().cubes),
                           cube_cfg(60, QueryGating::always), 11,
                           cube_primary_factory(env), cube_secondary_factory(),
                           cube_backend_factory(env, 0.45, 0.0));
  CHECK(m.backend_calls + m.cache_hits == m.total_queries);
  CHECK(m.cache_hits > 0);  // early stacks repeat across episodes
}

TEST_CASE("never-gated trials are bitwise identical to the standalone baseline") {
  const auto env = cube8();
  auto cfg = cube_cfg(25, QueryGating::never);
  cfg.record_trajectory = true;
  const auto guided = run_trial(
      env, cube_descriptor(env.config().cubes), cfg, 17,
      cube_primary_factory(env), cube_secondary_factory(),
      cube_backend_factory(env, 0.45, 0.0));
  const auto plain = baseline_trial(env, cfg, 17, cube_primary_factory(env));
  REQUIRE(guided.trajectory.size() == plain.trajectory.size());
  for (std::size_t i = 0; i < guided.trajectory.size(); ++i) {
    REQUIRE(guided.trajectory[i] == plain.trajectory[i]);
  }
  CHECK(guided.episode_returns == plain.episode_returns);
}

TEST_CASE("dqn purity holds on the image environment too") {
  const GridEnv env(make_image_config("oval10"));
  TrialConfig cfg;
  cfg.episodes = 3;
  cfg.horizon_override = 60;
  cfg.gating = QueryGating::never;
  cfg.reward_mode = SecondaryRewardMode::binary_01;
  cfg.primary_eps = EpsilonSchedule::exponential(1.0, 0.1, 0.998);
  cfg.secondary_eps = EpsilonSchedule::exponential(1.0, 0.1, 0.998);
  cfg.record_trajectory = true;

  DqnHyperparams hp;
  hp.hidden = {16, 16};
  hp.batch = 8;
  hp.replay_capacity = 512;
  auto mkp = [&](RngStream rng) {
    return DqnPrimary(static_cast<std::size_t>(env.num_cells()) + 2, 2, hp,
                      std::move(rng));
  };
  auto mks = [&](RngStream rng) {
    return NetSecondary(static_cast<std::size_t>(env.num_cells()), {16}, 1e-3,
                        std::move(rng));
  };
  auto mkb = [&](RngStream rng) -> std::unique_ptr<TextBackend> {
    return std::make_unique<ScriptedGridBackend>(
        env, ScriptedOracleConfig{0.45, 0.0}, rng);
  };

  const auto guided = run_trial(env, image_descriptor(), cfg, 23, mkp, mks, mkb);
  const auto plain = baseline_trial(env, cfg, 23, mkp);
  REQUIRE(guided.trajectory.size() == plain.trajectory.size());
  for (std::size_t i = 0; i < guided.trajectory.size(); ++i) {
    REQUIRE(guided.trajectory[i] == plain.trajectory[i]);
  }
}

TEST_CASE("image trials latch from imperfect grids and then solve quickly") {
  const GridEnv env(make_image_config("oval10"));
  TrialConfig cfg;
  cfg.episodes = 6;
  cfg.horizon_override = 250;
  cfg.gating = QueryGating::always;
  cfg.reward_mode = SecondaryRewardMode::binary_01;
  cfg.primary_eps = EpsilonSchedule::exponential(1.0, 0.1, 0.998);
  cfg.secondary_eps = EpsilonSchedule::exponential(1.0, 0.1, 0.998);

  DqnHyperparams hp;
  hp.hidden = {16, 16};
  hp.batch = 8;
  hp.replay_capacity = 512;
  auto mkp = [&](RngStream rng) {
    return DqnPrimary(static_cast<std::size_t>(env.num_cells()) + 2, 2, hp,
                      std::move(rng));
  };
  auto mks = [&](RngStream rng) {
    return NetSecondary(static_cast<std::size_t>(env.num_cells()), {16}, 1e-3,
                        std::move(rng));
  };
  auto mkb = [&](RngStream rng) -> std::unique_ptr<TextBackend> {
    return std::make_unique<ScriptedGridBackend>(
        env, ScriptedOracleConfig{0.45, 0.0}, rng);
  };

  const auto m = run_trial(env, image_descriptor(), cfg, 29, mkp, mks, mkb);
  REQUIRE(m.solution_found);
  // once latched, a later episode sweeps to the acceptance threshold
  bool solved = false;
  for (const double e : m.episode_max_eval) solved |= e > 0.95;
  CHECK(solved);
}

TEST_CASE("logistic rewards are rejected on the cube environment") {
  const auto env = cube8();
  auto cfg = cube_cfg(5, QueryGating::seq);
  cfg.reward_mode = SecondaryRewardMode::logistic;
  CHECK_THROWS_AS(
      run_trial(env, cube_descriptor(env.config().cubes), cfg, 1,
                cube_primary_factory(env), cube_secondary_factory(),
                cube_backend_factory(env, 0.45, 0.0)),
      std::invalid_argument);
}

TEST_CASE("parallel trial execution matches serial execution") {
  const auto env = cube8();
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  auto trial = [&](std::uint64_t seed) {
    return run_trial(env, cube_descriptor(env.config().cubes),
                     cube_cfg(30, QueryGating::seq), seed,
                     cube_primary_factory(env), cube_secondary_factory(),
                     cube_backend_factory(env, 0.45, 0.0));
  };
  const auto serial = run_trials(seeds, trial, 1);
  const auto parallel = run_trials(seeds, trial, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    CHECK(serial[i].episode_returns == parallel[i].episode_returns);
    CHECK(serial[i].total_queries == parallel[i].total_queries);
  }
}

TEST_CASE("episodes to a threshold evaluation and the median helper") {
  TrialMetrics m;
  m.episode_max_eval = {0.3, 0.9, 0.96, 1.0};
  CHECK(episodes_to_eval(m, 0.95, 99) == 2);
  CHECK(episodes_to_eval(m, 1.1, 99) == 99);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}
