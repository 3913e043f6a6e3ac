#include <doctest.h>

#include <cmath>
#include <limits>

#include "lagr/dqn.hpp"
#include "lagr/rng.hpp"

using namespace lagr;

TEST_CASE("replay ring keeps only the newest capacity transitions") {
  ReplayBuffer buf(8);
  for (int i = 0; i < 20; ++i) {
    buf.push({{static_cast<double>(i)}, 0, static_cast<double>(i), {0.0}, true});
  }
  CHECK(buf.size() == 8);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    CHECK(buf.at(i).reward >= 12.0);  // pushes 12..19 survive
  }
}

TEST_CASE("batch sampling is without replacement") {
  ReplayBuffer buf(64);
  for (int i = 0; i < 64; ++i) buf.push({{0.0}, 0, 0.0, {0.0}, true});
  RngStream rng = make_rng(2);
  for (int round = 0; round < 200; ++round) {
    const auto idx = buf.sample_indices(16, rng);
    REQUIRE(idx.size() == 16);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      CHECK(idx[i] < 64);
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        CHECK(idx[i] != idx[j]);
      }
    }
  }
  CHECK_THROWS_AS(buf.sample_indices(65, rng), std::invalid_argument);
}

TEST_CASE("repeated terminal transitions drive the value to the reward") {
  DqnHyperparams hp;
  hp.hidden = {16};
  hp.batch = 8;
  hp.replay_capacity = 64;
  hp.gamma = 0.95;
  hp.target_sync = 10;
  DqnCore core(3, 2, hp, make_rng(3));
  const std::vector<double> s{0.2, -0.4, 0.9};
  for (int i = 0; i < 8; ++i) core.remember({s, 1, 1.0, s, true});

  double q = 0.0;
  int steps = 0;
  for (; steps < 2000; ++steps) {
    REQUIRE(core.train_step().has_value());
    q = core.q_values(s)[1];
    if (std::fabs(q - 1.0) < 1e-2) break;
  }
  CHECK(std::fabs(q - 1.0) < 1e-2);
  CHECK(steps < 2000);
}

TEST_CASE("gamma zero reduces targets to immediate rewards") {
  DqnHyperparams hp;
  hp.hidden = {12};
  hp.batch = 4;
  hp.replay_capacity = 32;
  hp.gamma = 0.0;
  DqnCore core(2, 2, hp, make_rng(4));
  const std::vector<double> s{0.5, -0.5};
  const std::vector<double> s2{1.0, 1.0};
  // non-terminal transitions with reward 0.7: with gamma 0 the bootstrap
  // vanishes and Q(s, 0) must settle at 0.7
  for (int i = 0; i < 8; ++i) core.remember({s, 0, 0.7, s2, false});
  for (int i = 0; i < 3000; ++i) core.train_step();
  CHECK(core.q_values(s)[0] == doctest::Approx(0.7).epsilon(2e-2));
}

TEST_CASE("buffer smaller than the batch skips training") {
  DqnHyperparams hp;
  hp.batch = 32;
  DqnCore core(2, 2, hp, make_rng(5));
  core.remember({{0.0, 0.0}, 0, 0.0, {0.0, 0.0}, true});
  CHECK_FALSE(core.train_step().has_value());
}

TEST_CASE("a non-finite loss aborts with diagnostics") {
  DqnHyperparams hp;
  hp.hidden = {4};
  hp.batch = 2;
  DqnCore core(2, 2, hp, make_rng(6));
  for (int i = 0; i < 4; ++i) {
    core.remember({{1.0, 1.0}, 0, 1.0, {1.0, 1.0}, true});
  }
  core.net().layers[0].w[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(core.train_step(), std::runtime_error);
}
