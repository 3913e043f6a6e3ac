#pragma once

#include <cstdint>
#include <string_view>

namespace lagr {

// Counter-based deterministic stream (splitmix64). Draw sequences depend only
// on integer arithmetic, so they are identical across platforms and builds.
//
// fork(label) derives a child stream from the parent's base seed and the
// label, not from the parent's current position: forking never consumes a
// draw and the fork order does not matter.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : base_(mix(seed + 0x9E3779B97F4A7C15ULL)), state_(base_) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  RngStream fork(std::string_view label) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : label) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 0x100000001b3ULL;
    }
    return RngStream(mix(base_ ^ h));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t state_;
};

inline RngStream make_rng(std::uint64_t seed) { return RngStream(seed); }

}  // namespace lagr
