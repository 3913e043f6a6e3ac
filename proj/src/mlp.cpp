#include "lagr/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lagr/kernels.hpp"

namespace lagr {

Mlp Mlp::make(std::span<const std::size_t> sizes, RngStream& rng) {
  if (sizes.size() < 2) {
    throw std::invalid_argument("mlp needs at least input and output sizes");
  }
  Mlp net;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    Layer layer;
    layer.in = sizes[i];
    layer.out = sizes[i + 1];
    if (layer.in == 0 || layer.out == 0) {
      throw std::invalid_argument("zero-sized mlp layer");
    }
    layer.w.resize(layer.in * layer.out);
    layer.b.assign(layer.out, 0.0);
    // He-uniform fan-in init; sqrt keeps draws platform-stable.
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
    for (double& w : layer.w) w = rng.uniform(-limit, limit);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

bool Mlp::finite() const {
  for (const auto& l : layers) {
    for (const double w : l.w) {
      if (!std::isfinite(w)) return false;
    }
    for (const double b : l.b) {
      if (!std::isfinite(b)) return false;
    }
  }
  return true;
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
  MlpGrads g;
  for (const auto& l : net.layers) {
    g.layers.push_back({std::vector<double>(l.w.size(), 0.0),
                        std::vector<double>(l.b.size(), 0.0)});
  }
  return g;
}

void MlpGrads::reset() {
  for (auto& l : layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
}

void MlpGrads::scale(double factor) {
  for (auto& l : layers) {
    for (double& g : l.w) g *= factor;
    for (double& g : l.b) g *= factor;
  }
}

void mlp_forward(const Mlp& net, std::span<const double> input,
                 ForwardCache& cache, std::vector<double>& output) {
  if (input.size() != net.input_size()) {
    throw std::invalid_argument("mlp input size mismatch");
  }
  cache.act.resize(net.layers.size() + 1);
  cache.act[0].assign(input.begin(), input.end());
  const auto& ops = kernels::active();
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& layer = net.layers[i];
    auto& out = cache.act[i + 1];
    out.resize(layer.out);
    kernels::matvec(layer.w.data(), layer.b.data(), cache.act[i].data(),
                    out.data(), layer.out, layer.in);
    if (i + 1 < net.layers.size()) {
      ops.relu(out.data(), out.data(), out.size());
    }
  }
  output = cache.act.back();
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> input) {
  ForwardCache cache;
  std::vector<double> out;
  mlp_forward(net, input, cache, out);
  return out;
}

void mlp_backward(const Mlp& net, const ForwardCache& cache,
                  std::span<const double> dloss_doutput, MlpGrads& grads) {
  if (dloss_doutput.size() != net.output_size()) {
    throw std::invalid_argument("mlp output gradient size mismatch");
  }
  if (grads.layers.size() != net.layers.size()) {
    throw std::invalid_argument("gradient accumulator shape mismatch");
  }
  const auto& ops = kernels::active();
  std::vector<double> delta(dloss_doutput.begin(), dloss_doutput.end());
  std::vector<double> delta_prev;
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const auto& layer = net.layers[li];
    const auto& a_prev = cache.act[li];
    auto& g = grads.layers[li];
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (delta[r] != 0.0) {
        ops.axpy(delta[r], a_prev.data(), g.w.data() + r * layer.in,
                 layer.in);
      }
      g.b[r] += delta[r];
    }
    if (li == 0) break;
    delta_prev.assign(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (delta[r] != 0.0) {
        ops.axpy(delta[r], layer.w.data() + r * layer.in, delta_prev.data(),
                 layer.in);
      }
    }
    // a_prev holds post-relu values for hidden layers.
    ops.relu_mask(a_prev.data(), delta_prev.data(), delta_prev.size());
    delta.swap(delta_prev);
  }
}

void mlp_forward_batch(const Mlp& net, const double* inputs,
                       std::size_t batch, BatchCache& cache,
                       std::vector<double>& outputs) {
  const auto& ops = kernels::active();
  cache.batch = batch;
  cache.act.resize(net.layers.size() + 1);
  const std::size_t in0 = net.input_size();
  cache.act[0].assign(inputs, inputs + batch * in0);
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const auto& layer = net.layers[li];
    const auto& x = cache.act[li];
    auto& y = cache.act[li + 1];
    y.resize(batch * layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* w_row = layer.w.data() + r * layer.in;
      for (std::size_t b = 0; b < batch; ++b) {
        y[b * layer.out + r] =
            ops.dot(w_row, x.data() + b * layer.in, layer.in) + layer.b[r];
      }
    }
    if (li + 1 < net.layers.size()) {
      ops.relu(y.data(), y.data(), y.size());
    }
  }
  outputs = cache.act.back();
}

void mlp_backward_batch(const Mlp& net, const BatchCache& cache,
                        const double* dloss_doutputs, MlpGrads& grads) {
  const auto& ops = kernels::active();
  const std::size_t batch = cache.batch;
  std::vector<double> delta(
      dloss_doutputs, dloss_doutputs + batch * net.output_size());
  std::vector<double> delta_prev;
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const auto& layer = net.layers[li];
    const auto& a_prev = cache.act[li];
    auto& g = grads.layers[li];
    for (std::size_t r = 0; r < layer.out; ++r) {
      double* gw_row = g.w.data() + r * layer.in;
      for (std::size_t b = 0; b < batch; ++b) {
        const double d = delta[b * layer.out + r];
        if (d != 0.0) {
          ops.axpy(d, a_prev.data() + b * layer.in, gw_row, layer.in);
          g.b[r] += d;
        }
      }
    }
    if (li == 0) break;
    delta_prev.assign(batch * layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* w_row = layer.w.data() + r * layer.in;
      for (std::size_t b = 0; b < batch; ++b) {
        const double d = delta[b * layer.out + r];
        if (d != 0.0) {
          ops.axpy(d, w_row, delta_prev.data() + b * layer.in, layer.in);
        }
      }
    }
    ops.relu_mask(a_prev.data(), delta_prev.data(), delta_prev.size());
    delta.swap(delta_prev);
  }
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(MlpGrads::zeros_like(net)), v_(MlpGrads::zeros_like(net)) {}

void Adam::step(Mlp& net, const MlpGrads& grads) {
  ++t_;
  const double inv_bc1 = 1.0 / (1.0 - std::pow(beta1_, static_cast<double>(t_)));
  const double inv_bc2 = 1.0 / (1.0 - std::pow(beta2_, static_cast<double>(t_)));
  const auto& ops = kernels::active();
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    auto& layer = net.layers[li];
    ops.adam_update(layer.w.data(), grads.layers[li].w.data(),
                    m_.layers[li].w.data(), v_.layers[li].w.data(),
                    layer.w.size(), lr_, beta1_, beta2_, eps_, inv_bc1,
                    inv_bc2);
    ops.adam_update(layer.b.data(), grads.layers[li].b.data(),
                    m_.layers[li].b.data(), v_.layers[li].b.data(),
                    layer.b.size(), lr_, beta1_, beta2_, eps_, inv_bc1,
                    inv_bc2);
  }
}

namespace {
constexpr const char* kMlpMagic = "lagr-mlp v1";
}

void save_mlp(const Mlp& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kMlpMagic << "\n" << net.layers.size() + 1 << "\n";
  out << net.layers.front().in;
  for (const auto& l : net.layers) out << " " << l.out;
  out << "\n";
  char buf[32];
  for (const auto& l : net.layers) {
    for (const double w : l.w) {
      std::snprintf(buf, sizeof(buf), "%.17g", w);
      out << buf << "\n";
    }
    for (const double b : l.b) {
      std::snprintf(buf, sizeof(buf), "%.17g", b);
      out << buf << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Mlp load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != kMlpMagic) {
    throw std::runtime_error("bad mlp snapshot magic in " + path);
  }
  std::size_t n_sizes = 0;
  in >> n_sizes;
  if (!in || n_sizes < 2) throw std::runtime_error("bad shape header");
  std::vector<std::size_t> sizes(n_sizes);
  for (auto& s : sizes) in >> s;
  Mlp net;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    Mlp::Layer layer;
    layer.in = sizes[i];
    layer.out = sizes[i + 1];
    layer.w.resize(layer.in * layer.out);
    layer.b.resize(layer.out);
    for (double& w : layer.w) in >> w;
    for (double& b : layer.b) in >> b;
    net.layers.push_back(std::move(layer));
  }
  if (!in) throw std::runtime_error("truncated mlp snapshot: " + path);
  return net;
}

}  // namespace lagr
