#pragma once

#include <array>
#include <string>
#include <vector>

#include "lagr/dqn.hpp"
#include "lagr/mlp.hpp"
#include "lagr/tabular_q.hpp"

namespace lagr {

// Two arms everywhere: 0 = no-query, 1 = query.
inline constexpr int kNoQueryArm = 0;
inline constexpr int kQueryArm = 1;

// Query bandit over rendered-state keys; every pull is terminal.
class TabularBandit {
 public:
  explicit TabularBandit(double alpha) : q_(2, alpha, 0.0) {}

  std::array<double, 2> arm_values(const std::string& key) const {
    return {q_.value(key, 0), q_.value(key, 1)};
  }

  int select(const std::string& key, double epsilon, RngStream& rng) const {
    const auto v = arm_values(key);
    return static_cast<int>(select_action(std::span<const double>(v), epsilon, rng));
  }

  void update(const std::string& key, int arm, double reward) {
    q_.update_terminal(key, arm, reward);
  }

 private:
  TabularQ q_;
};

// Query bandit backed by a two-output net over the grid cells; one
// regression step toward the reward on the pulled arm.
class NetBandit {
 public:
  NetBandit(std::size_t input_size, const std::vector<std::size_t>& hidden,
            double learning_rate, RngStream rng)
      : net_(make_net(input_size, hidden, rng)), adam_(net_, learning_rate) {}

  std::array<double, 2> arm_values(std::span<const double> input) const {
    const auto out = mlp_forward(net_, input);
    return {out[0], out[1]};
  }

  int select(std::span<const double> input, double epsilon,
             RngStream& rng) const {
    const auto v = arm_values(input);
    return static_cast<int>(select_action(std::span<const double>(v), epsilon, rng));
  }

  void update(std::span<const double> input, int arm, double reward) {
    regression_step(net_, adam_, input, arm, reward);
  }

  const Mlp& net() const { return net_; }

 private:
  static Mlp make_net(std::size_t input_size,
                      const std::vector<std::size_t>& hidden, RngStream& rng) {
    std::vector<std::size_t> sizes;
    sizes.push_back(input_size);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(2);
    return Mlp::make(sizes, rng);
  }

  Mlp net_;
  Adam adam_;
};

}  // namespace lagr
