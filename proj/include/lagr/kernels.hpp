#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace lagr::kernels {

// Dense inner loops used by the MLP training path and the grid evaluator.
// Every entry point has a scalar reference implementation and, on x86 with
// AVX2+FMA, a vectorized variant. The active set is resolved once per
// process (LAGR_KERNELS=scalar|avx2 overrides CPU detection).
struct Ops {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*relu)(const double* x, double* y, std::size_t n);
  // grad[i] = 0 wherever act[i] <= 0 (act holds post-relu values)
  void (*relu_mask)(const double* act, double* grad, std::size_t n);
  // One Adam update over n parameters. inv_bc1/inv_bc2 are the
  // bias-correction reciprocals 1/(1-beta1^t), 1/(1-beta2^t).
  void (*adam_update)(double* w, const double* g, double* m, double* v,
                      std::size_t n, double lr, double beta1, double beta2,
                      double eps, double inv_bc1, double inv_bc2);
  std::size_t (*count_equal_u8)(const std::uint8_t* a, const std::uint8_t* b,
                                std::size_t n);
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when the build or CPU lacks AVX2+FMA

// Process-wide active kernel set.
const Ops& active();
// Force a specific set by name ("scalar", "avx2"); throws std::runtime_error
// if the set is unavailable.
void select(const std::string& name);

// y = W x + b with W row-major (rows x cols).
void matvec(const double* w, const double* bias, const double* x, double* y,
            std::size_t rows, std::size_t cols);

}  // namespace lagr::kernels
