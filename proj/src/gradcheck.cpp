#include "lagr/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace lagr {

namespace {

double* param_at(Mlp& net, std::size_t flat_index) {
  for (auto& layer : net.layers) {
    if (flat_index < layer.w.size()) return &layer.w[flat_index];
    flat_index -= layer.w.size();
    if (flat_index < layer.b.size()) return &layer.b[flat_index];
    flat_index -= layer.b.size();
  }
  throw std::out_of_range("parameter index out of range");
}

}  // namespace

double gradcheck_loss(const Mlp& net, const GradCheckBatch& batch) {
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
    const auto out = mlp_forward(net, batch.inputs[i]);
    const double err =
        out[static_cast<std::size_t>(batch.output_index[i])] - batch.target[i];
    loss += err * err;
  }
  return loss / static_cast<double>(batch.inputs.size());
}

std::vector<double> analytic_gradient(const Mlp& net,
                                      const GradCheckBatch& batch) {
  MlpGrads grads = MlpGrads::zeros_like(net);
  ForwardCache cache;
  std::vector<double> out;
  const double inv_n = 1.0 / static_cast<double>(batch.inputs.size());
  for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
    mlp_forward(net, batch.inputs[i], cache, out);
    const double err =
        out[static_cast<std::size_t>(batch.output_index[i])] - batch.target[i];
    std::vector<double> delta(out.size(), 0.0);
    delta[static_cast<std::size_t>(batch.output_index[i])] =
        2.0 * err * inv_n;
    mlp_backward(net, cache, delta, grads);
  }
  std::vector<double> flat;
  for (const auto& l : grads.layers) {
    flat.insert(flat.end(), l.w.begin(), l.w.end());
    flat.insert(flat.end(), l.b.begin(), l.b.end());
  }
  return flat;
}

std::vector<double> numeric_gradient(Mlp net, const GradCheckBatch& batch,
                                     double fd_step) {
  std::vector<double> flat(net.param_count());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    double* p = param_at(net, i);
    const double saved = *p;
    *p = saved + fd_step;
    const double up = gradcheck_loss(net, batch);
    *p = saved - fd_step;
    const double down = gradcheck_loss(net, batch);
    *p = saved;
    flat[i] = (up - down) / (2.0 * fd_step);
  }
  return flat;
}

GradCheckReport compare_gradients(const std::vector<double>& analytic,
                                  const std::vector<double>& numeric) {
  if (analytic.size() != numeric.size()) {
    throw std::invalid_argument("gradient size mismatch");
  }
  GradCheckReport report;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom =
        std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-3});
    const double rel = std::fabs(analytic[i] - numeric[i]) / denom;
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_param = i;
      report.analytic_at_worst = analytic[i];
      report.numeric_at_worst = numeric[i];
    }
  }
  return report;
}

GradCheckReport gradient_check(const Mlp& net, const GradCheckBatch& batch,
                               double fd_step) {
  return compare_gradients(analytic_gradient(net, batch),
                           numeric_gradient(net, batch, fd_step));
}

}  // namespace lagr
