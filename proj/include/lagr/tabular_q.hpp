#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lagr/rng.hpp"

namespace lagr {

// Epsilon-greedy pick over the values of the legal actions. Returns an index
// into the legal list; ties at the maximum are broken uniformly.
inline std::size_t select_action(std::span<const double> values, double epsilon,
                                 RngStream& rng) {
  if (values.empty()) throw std::invalid_argument("no legal actions");
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return static_cast<std::size_t>(rng.below(values.size()));
  }
  double best = values[0];
  for (const double v : values) {
    if (v > best) best = v;
  }
  std::vector<std::size_t> maximizers;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == best) maximizers.push_back(i);
  }
  if (maximizers.size() == 1) return maximizers[0];
  return maximizers[static_cast<std::size_t>(rng.below(maximizers.size()))];
}

// State-keyed action values; unseen entries read as zero.
class TabularQ {
 public:
  TabularQ(int num_actions, double alpha, double gamma)
      : num_actions_(num_actions), alpha_(alpha), gamma_(gamma) {}

  double value(const std::string& key, int action) const {
    const auto it = table_.find(key);
    if (it == table_.end()) return 0.0;
    return it->second[static_cast<std::size_t>(action)];
  }

  std::vector<double> values(const std::string& key,
                             std::span<const int> actions) const {
    std::vector<double> out;
    out.reserve(actions.size());
    const auto it = table_.find(key);
    for (const int a : actions) {
      out.push_back(it == table_.end()
                        ? 0.0
                        : it->second[static_cast<std::size_t>(a)]);
    }
    return out;
  }

  void update(const std::string& s, int a, double r, const std::string& s2,
              std::span<const int> legal_next, bool terminal) {
    double bootstrap = 0.0;
    if (!terminal) {
      if (legal_next.empty()) {
        throw std::invalid_argument(
            "non-terminal update with no legal next actions");
      }
      const auto it = table_.find(s2);
      double best = it == table_.end()
                        ? 0.0
                        : it->second[static_cast<std::size_t>(legal_next[0])];
      if (it != table_.end()) {
        for (const int an : legal_next) {
          best = std::max(best, it->second[static_cast<std::size_t>(an)]);
        }
      }
      bootstrap = gamma_ * best;
    }
    double& q = row(s)[static_cast<std::size_t>(a)];
    q += alpha_ * (r + bootstrap - q);
  }

  // Terminal-bandit update: no bootstrap term.
  void update_terminal(const std::string& s, int a, double r) {
    double& q = row(s)[static_cast<std::size_t>(a)];
    q += alpha_ * (r - q);
  }

  std::size_t num_states() const { return table_.size(); }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

 private:
  std::vector<double>& row(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) {
      it = table_
               .emplace(key, std::vector<double>(
                                 static_cast<std::size_t>(num_actions_), 0.0))
               .first;
    }
    return it->second;
  }

  int num_actions_;
  double alpha_;
  double gamma_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

}  // namespace lagr
