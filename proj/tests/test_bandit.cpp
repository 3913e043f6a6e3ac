#include <doctest.h>

#include <cmath>

#include "lagr/bandit.hpp"
#include "lagr/rng.hpp"

using namespace lagr;

TEST_CASE("terminal bandit updates have no bootstrap") {
  TabularBandit b(0.1);
  b.update("s", kQueryArm, 1.0);
  CHECK(b.arm_values("s")[1] == doctest::Approx(0.1));
  b.update("s", kNoQueryArm, 0.0);
  CHECK(b.arm_values("s")[0] == 0.0);
}

TEST_CASE("alternating rewards stay bounded") {
  TabularBandit b(0.1);
  for (int i = 0; i < 500; ++i) {
    b.update("s", kQueryArm, i % 2 == 0 ? 1.0 : -1.0);
    const double q = b.arm_values("s")[1];
    CHECK(q > -1.0);
    CHECK(q < 1.0);
  }
}

TEST_CASE("greedy arm converges per state within 200 visits") {
  TabularBandit b(0.1);
  RngStream rng = make_rng(7);
  // querying from s_good always pays +1, from s_bad always -1
  for (int visit = 0; visit < 200; ++visit) {
    const int arm_good = b.select("s_good", 0.1, rng);
    b.update("s_good", arm_good, arm_good == kQueryArm ? 1.0 : 0.0);
    const int arm_bad = b.select("s_bad", 0.1, rng);
    b.update("s_bad", arm_bad, arm_bad == kQueryArm ? -1.0 : 0.0);
  }
  CHECK(b.select("s_good", 0.0, rng) == kQueryArm);
  CHECK(b.select("s_bad", 0.0, rng) == kNoQueryArm);
}

TEST_CASE("net bandit regresses the pulled arms toward their rewards") {
  NetBandit b(4, {16}, 1e-2, make_rng(8));
  const std::vector<double> x{1.0, 0.0, 1.0, 0.0};
  for (int i = 0; i < 1500; ++i) {
    b.update(x, kQueryArm, 1.0);
    b.update(x, kNoQueryArm, -0.5);
  }
  const auto v = b.arm_values(x);
  CHECK(v[1] == doctest::Approx(1.0).epsilon(5e-2));
  CHECK(v[0] == doctest::Approx(-0.5).epsilon(5e-2));
  RngStream rng = make_rng(9);
  CHECK(b.select(x, 0.0, rng) == kQueryArm);
}
