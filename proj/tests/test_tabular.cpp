#include <doctest.h>

#include <array>
#include <cmath>
#include <map>

#include "lagr/rng.hpp"
#include "lagr/tabular_q.hpp"

using namespace lagr;

TEST_CASE("q update moves toward the target") {
  TabularQ q(2, 0.1, 0.95);
  q.update("s", 1, 1.0, "t", {}, true);
  CHECK(q.value("s", 1) == doctest::Approx(0.1));
  q.update("s", 1, 1.0, "t", {}, true);
  CHECK(q.value("s", 1) == doctest::Approx(0.19));

  // all-zero table, zero reward: fixed point
  q.update("a", 0, 0.0, "b", std::array<int, 2>{0, 1}, false);
  CHECK(q.value("a", 0) == 0.0);
}

TEST_CASE("unseen entries read as zero") {
  const TabularQ q(3, 0.1, 0.95);
  CHECK(q.value("never seen", 2) == 0.0);
}

TEST_CASE("non-terminal update without legal next actions is rejected") {
  TabularQ q(2, 0.1, 0.95);
  CHECK_THROWS_AS(q.update("s", 0, 1.0, "t", {}, false),
                  std::invalid_argument);
}

TEST_CASE("bootstrap uses the maximum over legal next actions only") {
  TabularQ q(3, 1.0, 1.0);  // alpha 1, gamma 1 for a direct read
  q.update("next", 0, 5.0, "z", {}, true);
  q.update("next", 2, 9.0, "z", {}, true);
  // action 2 is illegal from "next": the bootstrap must use Q(next,0)=5
  q.update("s", 1, 0.0, "next", std::array<int, 2>{0, 1}, false);
  CHECK(q.value("s", 1) == doctest::Approx(5.0));
}

TEST_CASE("greedy selection takes the argmax") {
  RngStream rng = make_rng(1);
  const std::array<double, 3> values{1.0, 3.0, 2.0};
  for (int i = 0; i < 20; ++i) {
    CHECK(select_action(values, 0.0, rng) == 1);
  }
  CHECK_THROWS_AS(select_action(std::span<const double>{}, 0.0, rng),
                  std::invalid_argument);
}

TEST_CASE("full exploration is uniform over legal actions") {
  RngStream rng = make_rng(2);
  const std::array<double, 4> values{0.0, 10.0, -3.0, 4.0};
  std::array<int, 4> counts{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[select_action(values, 1.0, rng)];
  const double expected = n / 4.0;
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (const int c : counts) CHECK(std::fabs(c - expected) < 3.0 * sigma);
}

TEST_CASE("ties at the maximum break uniformly") {
  RngStream rng = make_rng(3);
  const std::array<double, 2> values{2.0, 2.0};
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) first += select_action(values, 0.0, rng) == 0;
  const double sigma = std::sqrt(n * 0.25);
  CHECK(std::fabs(first - n / 2.0) < 3.0 * sigma);
}

TEST_CASE("greedy choice is invariant to positive affine rescaling") {
  const std::array<double, 5> values{0.3, 1.8, 1.8, -0.5, 0.9};
  std::array<double, 5> rescaled{};
  for (std::size_t i = 0; i < values.size(); ++i) {
    rescaled[i] = 4.0 * values[i] + 7.0;
  }
  RngStream a = make_rng(4), b = make_rng(4);
  for (int i = 0; i < 2000; ++i) {
    CHECK(select_action(values, 0.0, a) == select_action(rescaled, 0.0, b));
  }
}

// 3-state deterministic chain: from s0/s1 "advance" moves right, "stay"
// loops; entering s2 is terminal with reward 1. Exact values come from an
// independent value-iteration oracle.
TEST_CASE("q-learning matches value iteration on a deterministic chain") {
  const double gamma = 0.95;

  // value iteration oracle over states {0, 1}, actions {stay, advance}
  std::array<double, 2> v{0.0, 0.0};
  for (int sweep = 0; sweep < 10000; ++sweep) {
    const std::array<double, 2> prev = v;
    v[1] = std::max(gamma * prev[1], 1.0);
    v[0] = std::max(gamma * prev[0], 0.0 + gamma * prev[1]);
  }
  std::map<std::pair<int, int>, double> exact{
      {{0, 0}, gamma * v[0]},
      {{0, 1}, gamma * v[1]},
      {{1, 0}, gamma * v[1]},
      {{1, 1}, 1.0},
  };

  TabularQ q(2, 0.1, gamma);
  RngStream rng = make_rng(5);
  const std::array<int, 2> both{0, 1};
  int s = 0;
  for (int update = 0; update < 10000; ++update) {
    const int a = static_cast<int>(rng.below(2));
    int next = s;
    double r = 0.0;
    bool terminal = false;
    if (a == 1) {
      if (s == 1) {
        r = 1.0;
        terminal = true;
      } else {
        next = s + 1;
      }
    }
    q.update(std::to_string(s), a, r, std::to_string(next), both, terminal);
    s = terminal ? 0 : next;
  }
  for (const auto& [sa, qstar] : exact) {
    CHECK(q.value(std::to_string(sa.first), sa.second) ==
          doctest::Approx(qstar).epsilon(1e-3));
  }
}
