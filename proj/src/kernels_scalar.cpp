#include "lagr/kernels.hpp"

#include <cmath>

namespace lagr::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_scalar(const double* act, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (act[i] <= 0.0) grad[i] = 0.0;
  }
}

void adam_scalar(double* w, const double* g, double* m, double* v,
                 std::size_t n, double lr, double beta1, double beta2,
                 double eps, double inv_bc1, double inv_bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    const double mhat = m[i] * inv_bc1;
    const double vhat = v[i] * inv_bc2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

std::size_t count_equal_u8_scalar(const std::uint8_t* a, const std::uint8_t* b,
                                  std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += (a[i] == b[i]) ? 1 : 0;
  return count;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",         dot_scalar,  axpy_scalar,
      relu_scalar,      relu_mask_scalar, adam_scalar,
      count_equal_u8_scalar,
  };
  return ops;
}

}  // namespace lagr::kernels
