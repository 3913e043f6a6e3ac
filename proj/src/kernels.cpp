#include "lagr/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace lagr::kernels {
namespace {

const Ops* resolve() {
  if (const char* env = std::getenv("LAGR_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_ops();
    if (want == "avx2") {
      if (const Ops* ops = avx2_ops()) return ops;
      throw std::runtime_error("LAGR_KERNELS=avx2 but AVX2 is unavailable");
    }
    throw std::runtime_error("unknown LAGR_KERNELS value: " + want);
  }
  if (const Ops* ops = avx2_ops()) return ops;
  return &scalar_ops();
}

const Ops*& active_slot() {
  static const Ops* slot = resolve();
  return slot;
}

}  // namespace

const Ops& active() { return *active_slot(); }

void select(const std::string& name) {
  if (name == "scalar") {
    active_slot() = &scalar_ops();
    return;
  }
  if (name == "avx2") {
    if (const Ops* ops = avx2_ops()) {
      active_slot() = ops;
      return;
    }
    throw std::runtime_error("AVX2 kernels unavailable on this machine");
  }
  throw std::runtime_error("unknown kernel set: " + name);
}

void matvec(const double* w, const double* bias, const double* x, double* y,
            std::size_t rows, std::size_t cols) {
  const Ops& ops = active();
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = ops.dot(w + r * cols, x, cols) + bias[r];
  }
}

}  // namespace lagr::kernels
