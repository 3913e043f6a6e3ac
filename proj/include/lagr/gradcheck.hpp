#pragma once

#include <cstddef>
#include <vector>

#include "lagr/mlp.hpp"

namespace lagr {

// A supervised batch shaped like the DQN regression: for each sample, the
// squared error on one output index against a scalar target.
struct GradCheckBatch {
  std::vector<std::vector<double>> inputs;
  std::vector<int> output_index;
  std::vector<double> target;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t worst_param = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// Mean over the batch of (Q(x)[a] - y)^2.
double gradcheck_loss(const Mlp& net, const GradCheckBatch& batch);

// Backprop gradients flattened in layer order (w then b per layer).
std::vector<double> analytic_gradient(const Mlp& net,
                                      const GradCheckBatch& batch);

// Central differences with the given step on every parameter.
std::vector<double> numeric_gradient(Mlp net, const GradCheckBatch& batch,
                                     double fd_step);

GradCheckReport compare_gradients(const std::vector<double>& analytic,
                                  const std::vector<double>& numeric);

GradCheckReport gradient_check(const Mlp& net, const GradCheckBatch& batch,
                               double fd_step = 1e-5);

}  // namespace lagr
