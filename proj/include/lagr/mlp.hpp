#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lagr/rng.hpp"

namespace lagr {

// Fully connected net: rectifier on hidden layers, identity output.
// Double precision throughout; weights row-major per layer.
struct Mlp {
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;  // out x in
    std::vector<double> b;  // out
  };

  std::vector<Layer> layers;

  static Mlp make(std::span<const std::size_t> sizes, RngStream& rng);

  std::size_t input_size() const { return layers.front().in; }
  std::size_t output_size() const { return layers.back().out; }
  std::size_t param_count() const;
  bool finite() const;
};

// Per-layer activations kept for the backward pass. act[0] is the input,
// act[i] the post-activation output of layer i-1.
struct ForwardCache {
  std::vector<std::vector<double>> act;
};

// Gradient accumulator mirroring the net's shapes.
struct MlpGrads {
  struct Layer {
    std::vector<double> w;
    std::vector<double> b;
  };
  std::vector<Layer> layers;

  static MlpGrads zeros_like(const Mlp& net);
  void reset();
  void scale(double factor);
};

void mlp_forward(const Mlp& net, std::span<const double> input,
                 ForwardCache& cache, std::vector<double>& output);
// Convenience overload when no backward pass follows.
std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input);

// Accumulates dLoss/dparams into `grads` given dLoss/doutput for the sample
// held in `cache`.
void mlp_backward(const Mlp& net, const ForwardCache& cache,
                  std::span<const double> dloss_doutput, MlpGrads& grads);

// Batched variants used by the DQN trainer: activations are batch-major
// contiguous matrices (batch x width). The loops run row-blocked so each
// weight row is loaded once per batch, but per-element accumulation order
// matches the per-sample path, so results are bitwise identical to looping
// mlp_forward/mlp_backward over the batch.
struct BatchCache {
  std::size_t batch = 0;
  std::vector<std::vector<double>> act;  // act[l]: batch x width_l
};

void mlp_forward_batch(const Mlp& net, const double* inputs,
                       std::size_t batch, BatchCache& cache,
                       std::vector<double>& outputs);
void mlp_backward_batch(const Mlp& net, const BatchCache& cache,
                        const double* dloss_doutputs, MlpGrads& grads);

// Adam with bias correction; moment shapes mirror the net.
class Adam {
 public:
  Adam(const Mlp& net, double lr = 1e-3, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8);

  void step(Mlp& net, const MlpGrads& grads);
  long steps_taken() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  MlpGrads m_, v_;
};

// Text snapshot with a versioned magic string and a shape header.
void save_mlp(const Mlp& net, const std::string& path);
Mlp load_mlp(const std::string& path);

}  // namespace lagr
