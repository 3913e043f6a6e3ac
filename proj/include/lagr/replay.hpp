#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lagr/rng.hpp"

namespace lagr {

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

// Fixed-capacity ring of transitions with uniform without-replacement batch
// sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity is zero");
  }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return data_[i]; }

  // Floyd's sampling: k distinct indices, order deterministic given the rng.
  std::vector<std::size_t> sample_indices(std::size_t k, RngStream& rng) const {
    if (k > data_.size()) {
      throw std::invalid_argument("batch larger than buffer");
    }
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t j = data_.size() - k; j < data_.size(); ++j) {
      const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
      bool seen = false;
      for (const std::size_t p : picked) {
        if (p == t) {
          seen = true;
          break;
        }
      }
      picked.push_back(seen ? j : t);
    }
    return picked;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

}  // namespace lagr
