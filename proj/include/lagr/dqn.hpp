#pragma once

#include <optional>
#include <vector>

#include "lagr/mlp.hpp"
#include "lagr/replay.hpp"
#include "lagr/rng.hpp"

namespace lagr {

struct DqnHyperparams {
  std::vector<std::size_t> hidden = {128, 128};
  std::size_t batch = 32;
  std::size_t replay_capacity = 10000;
  double gamma = 0.95;
  double learning_rate = 1e-3;
  long target_sync = 100;  // 1 reproduces the no-target-network behavior
};

// Q-network trainer: replay buffer, target copy, mse on the taken action's
// output, one Adam step per call.
class DqnCore {
 public:
  DqnCore(std::size_t input_size, std::size_t num_actions,
          const DqnHyperparams& hp, RngStream rng);

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const DqnHyperparams& hp() const { return hp_; }
  std::size_t buffer_size() const { return buffer_.size(); }
  long train_steps() const { return train_steps_; }

  std::vector<double> q_values(std::span<const double> state) const {
    return mlp_forward(net_, state);
  }

  void remember(Transition t) { buffer_.push(std::move(t)); }

  // Returns the batch loss, or nothing when the buffer is still smaller than
  // the batch size. Throws on a non-finite loss.
  std::optional<double> train_step();

 private:
  DqnHyperparams hp_;
  Mlp net_;
  Mlp target_;
  Adam adam_;
  ReplayBuffer buffer_;
  RngStream sample_rng_;
  long train_steps_ = 0;

  // scratch, reused across steps
  MlpGrads grads_;
  BatchCache cache_;
  BatchCache target_cache_;
  std::vector<double> states_;
  std::vector<double> next_states_;
  std::vector<double> q_;
  std::vector<double> next_q_;
  std::vector<double> delta_;
};

// One supervised regression step of (input -> target on one output) pairs,
// used by the net-backed query bandit. Returns the mse loss.
double regression_step(Mlp& net, Adam& adam, std::span<const double> input,
                       int output_index, double target);

}  // namespace lagr
