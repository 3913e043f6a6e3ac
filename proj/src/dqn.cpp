#include "lagr/dqn.hpp"

#include <cmath>
#include <stdexcept>

namespace lagr {

namespace {

std::vector<std::size_t> full_sizes(std::size_t input,
                                    const std::vector<std::size_t>& hidden,
                                    std::size_t output) {
  std::vector<std::size_t> sizes;
  sizes.push_back(input);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output);
  return sizes;
}

}  // namespace

DqnCore::DqnCore(std::size_t input_size, std::size_t num_actions,
                 const DqnHyperparams& hp, RngStream rng)
    : hp_(hp),
      net_(Mlp::make(full_sizes(input_size, hp.hidden, num_actions),
                     rng)),
      target_(net_),
      adam_(net_, hp.learning_rate),
      buffer_(hp.replay_capacity),
      sample_rng_(rng.fork("replay")),
      grads_(MlpGrads::zeros_like(net_)) {
  if (hp_.batch == 0) throw std::invalid_argument("batch size is zero");
  if (hp_.target_sync < 1) {
    throw std::invalid_argument("target_sync must be >= 1");
  }
}

std::optional<double> DqnCore::train_step() {
  if (buffer_.size() < hp_.batch) return std::nullopt;
  const auto idx = buffer_.sample_indices(hp_.batch, sample_rng_);
  const std::size_t batch = hp_.batch;
  const std::size_t in = net_.input_size();
  const std::size_t out = net_.output_size();

  states_.resize(batch * in);
  next_states_.resize(batch * in);
  for (std::size_t b = 0; b < batch; ++b) {
    const Transition& tr = buffer_.at(idx[b]);
    std::copy(tr.state.begin(), tr.state.end(), states_.begin() + b * in);
    std::copy(tr.next_state.begin(), tr.next_state.end(),
              next_states_.begin() + b * in);
  }

  mlp_forward_batch(target_, next_states_.data(), batch, target_cache_,
                    next_q_);
  mlp_forward_batch(net_, states_.data(), batch, cache_, q_);

  grads_.reset();
  delta_.assign(batch * out, 0.0);
  double loss = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const Transition& tr = buffer_.at(idx[b]);
    double y = tr.reward;
    if (!tr.terminal) {
      double best = next_q_[b * out];
      for (std::size_t a = 1; a < out; ++a) {
        best = std::max(best, next_q_[b * out + a]);
      }
      y += hp_.gamma * best;
    }
    const double err = q_[b * out + static_cast<std::size_t>(tr.action)] - y;
    loss += err * err * inv_batch;
    delta_[b * out + static_cast<std::size_t>(tr.action)] =
        2.0 * err * inv_batch;
  }
  if (!std::isfinite(loss)) {
    throw std::runtime_error("dqn loss diverged (non-finite) at train step " +
                             std::to_string(train_steps_));
  }
  mlp_backward_batch(net_, cache_, delta_.data(), grads_);
  adam_.step(net_, grads_);
  ++train_steps_;
  if (train_steps_ % hp_.target_sync == 0) target_ = net_;
  return loss;
}

double regression_step(Mlp& net, Adam& adam, std::span<const double> input,
                       int output_index, double target) {
  ForwardCache cache;
  std::vector<double> out;
  mlp_forward(net, input, cache, out);
  const double err = out[static_cast<std::size_t>(output_index)] - target;
  MlpGrads grads = MlpGrads::zeros_like(net);
  std::vector<double> delta(out.size(), 0.0);
  delta[static_cast<std::size_t>(output_index)] = 2.0 * err;
  mlp_backward(net, cache, delta, grads);
  adam.step(net, grads);
  const double loss = err * err;
  if (!std::isfinite(loss)) {
    throw std::runtime_error("bandit regression loss diverged");
  }
  return loss;
}

}  // namespace lagr
