#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lagr {

// Exploration schedule. Linear decays from `initial` to `minimum` over
// `decay` episodes; exponential multiplies by `decay` per episode and clamps
// at `minimum`.
struct EpsilonSchedule {
  enum class Kind { linear, exponential };

  Kind kind = Kind::linear;
  double initial = 1.0;
  double minimum = 0.05;
  double decay = 1.0;  // episodes-to-minimum (linear) or per-episode factor

  static EpsilonSchedule linear(double initial, double minimum,
                                double episodes_to_min) {
    validate_bounds(initial, minimum);
    if (!(episodes_to_min > 0.0)) {
      throw std::invalid_argument("linear schedule needs episodes_to_min > 0");
    }
    return {Kind::linear, initial, minimum, episodes_to_min};
  }

  static EpsilonSchedule exponential(double initial, double minimum,
                                     double factor) {
    validate_bounds(initial, minimum);
    if (!(factor > 0.0) || factor > 1.0) {
      throw std::invalid_argument("exponential factor must be in (0, 1]");
    }
    return {Kind::exponential, initial, minimum, factor};
  }

  double at(long episode) const {
    if (episode < 0) throw std::invalid_argument("episode must be >= 0");
    if (kind == Kind::linear) {
      if (static_cast<double>(episode) >= decay) return minimum;
      return initial -
             (initial - minimum) * (static_cast<double>(episode) / decay);
    }
    return std::max(minimum,
                    initial * std::pow(decay, static_cast<double>(episode)));
  }

 private:
  static void validate_bounds(double initial, double minimum) {
    if (!(initial >= 0.0) || initial > 1.0 || !(minimum >= 0.0) ||
        minimum > 1.0) {
      throw std::invalid_argument("epsilon bounds must be probabilities");
    }
    if (initial < minimum) {
      throw std::invalid_argument("initial epsilon below minimum");
    }
  }
};

}  // namespace lagr
