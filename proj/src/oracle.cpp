#include "lagr/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace lagr {

const char* parse_status_name(ParseStatus s) {
  switch (s) {
    case ParseStatus::ok: return "ok";
    case ParseStatus::malformed: return "malformed";
    case ParseStatus::constraint_violation: return "constraint-violation";
  }
  return "unknown";
}

namespace {

bool error_coin(RngStream& rng, double temperature, double kappa_slope) {
  const double p = std::clamp(temperature * kappa_slope, 0.0, 1.0);
  if (p <= 0.0) return false;
  return rng.uniform() < p;
}

}  // namespace

std::string ScriptedCubeBackend::complete(const OracleQuery& q) {
  const auto parsed = env_.parse_state(q.rendered_state);
  if (!parsed.ok()) {
    throw OracleBackendError(OracleErrorKind::config,
                             "scripted cube backend got an unrenderable state");
  }
  const CubeStackState& state = *parsed.value;
  const double f = env_.completion_fraction(state);
  std::vector<int> target;
  const bool consistent = env_.matches_target_prefix(state, &target);
  const bool wrong = error_coin(rng_, q.temperature, cfg_.kappa_slope);

  if (f >= cfg_.theta && consistent && !wrong) {
    return env_.render_state({target});
  }

  // Corrupted completion: keep the observed stack, append the remaining
  // cubes in descending id order, and nudge with adjacent swaps should that
  // accidentally form a valid target.
  CubeStackState candidate = state;
  std::vector<int> remaining;
  for (int id = env_.num_cubes(); id >= 1; --id) {
    if (std::find(state.stack.begin(), state.stack.end(), id) ==
        state.stack.end()) {
      remaining.push_back(id);
    }
  }
  candidate.stack.insert(candidate.stack.end(), remaining.begin(),
                         remaining.end());
  const auto is_exact_target = [this](const CubeStackState& c) {
    for (const auto& t : env_.config().target_orders) {
      if (c.stack == t) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i + 1 < candidate.stack.size(); ++i) {
    if (!is_exact_target(candidate)) break;
    std::swap(candidate.stack[i], candidate.stack[i + 1]);
  }
  return env_.render_state(candidate);
}

std::string ScriptedGridBackend::complete(const OracleQuery& q) {
  const auto parsed = env_.parse_state(q.rendered_state);
  if (!parsed.ok()) {
    throw OracleBackendError(OracleErrorKind::config,
                             "scripted grid backend got an unrenderable state");
  }
  const GridState& state = *parsed.value;
  const double f = env_.completion_fraction(state);
  const bool wrong = error_coin(rng_, q.temperature, cfg_.kappa_slope);
  const auto& target = env_.config().target;

  if (f >= cfg_.theta && !wrong) {
    return env_.render_cells(target.cells);
  }

  // Corrupted completion: the target shifted one column (wrapping), merged
  // with the observed objects. Shift further in the unlikely case the merge
  // still clears the acceptance threshold.
  const int w = env_.width();
  const int h = env_.height();
  for (int shift = 1; shift <= w; ++shift) {
    std::vector<std::uint8_t> cells(state.cells);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int src = r * w + ((c - shift) % w + w) % w;
        if (target.cells[static_cast<std::size_t>(src)] == 1) {
          cells[static_cast<std::size_t>(r * w + c)] = 1;
        }
      }
    }
    GridState candidate{cells, 0};
    if (!env_.is_solution(candidate) || shift == w) {
      return env_.render_cells(cells);
    }
  }
  return env_.render_cells(state.cells);  // unreachable
}

SolutionParse<CubeStackState> parse_solution(const CubeEnv& env,
                                             std::string_view text) {
  SolutionParse<CubeStackState> out;
  auto parsed = env.parse_state(text);
  out.detail = parsed.error;
  if (!parsed.ok()) {
    out.status = parsed.error == ParseError::no_structure
                     ? ParseStatus::malformed
                     : ParseStatus::constraint_violation;
    return out;
  }
  // The final stack must contain every cube exactly once; the parse already
  // rejected duplicates and unknown letters.
  if (static_cast<int>(parsed.value->stack.size()) != env.num_cubes()) {
    out.status = ParseStatus::constraint_violation;
    out.detail = ParseError::wrong_dimensions;
    return out;
  }
  out.status = ParseStatus::ok;
  out.detail = ParseError::none;
  out.state = std::move(parsed.value);
  return out;
}

SolutionParse<GridState> parse_solution(const GridEnv& env,
                                        std::string_view text) {
  SolutionParse<GridState> out;
  auto parsed = env.parse_state(text);
  out.detail = parsed.error;
  if (!parsed.ok()) {
    out.status = parsed.error == ParseError::no_structure
                     ? ParseStatus::malformed
                     : ParseStatus::constraint_violation;
    return out;
  }
  out.status = ParseStatus::ok;
  out.detail = ParseError::none;
  out.state = std::move(parsed.value);
  return out;
}

CubeStackState partial_target_state(const CubeEnv& env, double fraction,
                                    double* achieved) {
  const auto& target = env.config().target_orders.front();
  const int n = env.num_cubes();
  const int k = std::clamp(
      static_cast<int>(std::llround(fraction * static_cast<double>(n))), 0, n);
  if (achieved != nullptr) {
    *achieved = static_cast<double>(k) / static_cast<double>(n);
  }
  CubeStackState s;
  s.stack.assign(target.begin(), target.begin() + k);
  return s;
}

GridState partial_target_state(const GridEnv& env, double fraction,
                               double* achieved) {
  const auto& target = env.config().target;
  const int total = target.ones();
  const int k = std::clamp(
      static_cast<int>(std::llround(fraction * static_cast<double>(total))), 0,
      total);
  if (achieved != nullptr) {
    *achieved = total == 0 ? 1.0
                           : static_cast<double>(k) / static_cast<double>(total);
  }
  GridState s = env.reset();
  int placed = 0;
  for (std::size_t i = 0; i < target.cells.size() && placed < k; ++i) {
    if (target.cells[i] == 1) {
      s.cells[i] = 1;
      ++placed;
    }
  }
  return s;
}

}  // namespace lagr
