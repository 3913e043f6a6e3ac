#include "lagr/cube_env.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace lagr {

const char* parse_error_name(ParseError e) {
  switch (e) {
    case ParseError::none: return "none";
    case ParseError::no_structure: return "no_structure";
    case ParseError::bad_symbol: return "bad_symbol";
    case ParseError::duplicate_symbol: return "duplicate_symbol";
    case ParseError::wrong_dimensions: return "wrong_dimensions";
    case ParseError::non_binary: return "non_binary";
  }
  return "unknown";
}

std::vector<CubeSpec> default_cube_specs() {
  return {
      {1, 5.0, "Red"},  {2, 4.0, "Red"},  {3, 3.0, "Red"},  {4, 2.0, "Red"},
      {5, 10.0, "Blue"}, {6, 8.0, "Blue"}, {7, 6.0, "Blue"}, {8, 2.0, "Blue"},
  };
}

std::vector<CubeSpec> cube_specs_for_size(int n) {
  if (n < 2 || n > 11) {
    throw std::invalid_argument("cube set size must be in [2, 11]");
  }
  std::vector<CubeSpec> master = default_cube_specs();
  master.push_back({9, 12.0, "Green"});
  master.push_back({10, 9.0, "Green"});
  master.push_back({11, 7.0, "Green"});
  master.resize(static_cast<std::size_t>(n));
  return master;
}

std::vector<std::vector<int>> decreasing_size_targets(
    const std::vector<CubeSpec>& cubes) {
  std::vector<CubeSpec> sorted = cubes;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CubeSpec& a, const CubeSpec& b) {
                     if (a.edge_cm != b.edge_cm) return a.edge_cm > b.edge_cm;
                     return a.id < b.id;
                   });
  // Group runs of equal edge length and emit every arrangement within a run.
  std::vector<std::vector<int>> orders{{}};
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].edge_cm == sorted[i].edge_cm) ++j;
    std::vector<int> run;
    for (std::size_t k = i; k < j; ++k) run.push_back(sorted[k].id);
    std::vector<std::vector<int>> expanded;
    std::sort(run.begin(), run.end());
    do {
      for (const auto& prefix : orders) {
        std::vector<int> next = prefix;
        next.insert(next.end(), run.begin(), run.end());
        expanded.push_back(std::move(next));
      }
    } while (std::next_permutation(run.begin(), run.end()));
    orders = std::move(expanded);
    i = j;
  }
  return orders;
}

CubeEnvConfig make_cube_config(int n) {
  CubeEnvConfig cfg;
  cfg.cubes = cube_specs_for_size(n);
  cfg.target_orders = decreasing_size_targets(cfg.cubes);
  return cfg;
}

CubeEnv::CubeEnv(CubeEnvConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.cubes.empty()) throw std::invalid_argument("no cubes configured");
  for (std::size_t i = 0; i < cfg_.cubes.size(); ++i) {
    if (cfg_.cubes[i].id != static_cast<int>(i) + 1) {
      throw std::invalid_argument("cube ids must be 1..n in order");
    }
  }
  if (cfg_.target_orders.empty()) {
    cfg_.target_orders = decreasing_size_targets(cfg_.cubes);
  }
  for (const auto& t : cfg_.target_orders) {
    std::vector<int> sorted = t;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != static_cast<int>(i) + 1 ||
          t.size() != cfg_.cubes.size()) {
        throw std::invalid_argument(
            "target order must be a permutation of all cube ids");
      }
    }
  }
}

std::string CubeEnv::id() const {
  return "cube" + std::to_string(num_cubes());
}

int CubeEnv::match_count(const std::vector<int>& stack,
                         const std::vector<int>& target) const {
  int c = 0;
  const std::size_t m = std::min(stack.size(), target.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (stack[i] == target[i]) ++c;
  }
  return c;
}

double CubeEnv::evaluate(const State& s) const {
  int best = 0;
  for (const auto& t : cfg_.target_orders) {
    best = std::max(best, match_count(s.stack, t));
  }
  return static_cast<double>(s.stack.size()) * static_cast<double>(best);
}

double CubeEnv::eval_fraction(const State& s) const {
  const double n = static_cast<double>(num_cubes());
  return evaluate(s) / (n * n);
}

std::vector<CubeAction> CubeEnv::legal_actions(const State& s) const {
  std::vector<CubeAction> acts;
  if (s.stack.size() < cfg_.cubes.size()) {
    for (const auto& spec : cfg_.cubes) {
      if (std::find(s.stack.begin(), s.stack.end(), spec.id) ==
          s.stack.end()) {
        acts.push_back(CubeAction::place(spec.id));
      }
    }
  }
  if (!s.stack.empty()) acts.push_back(CubeAction::pop());
  return acts;
}

bool CubeEnv::is_exact_target(const State& s) const {
  if (s.stack.size() != cfg_.cubes.size()) return false;
  for (const auto& t : cfg_.target_orders) {
    if (s.stack == t) return true;
  }
  return false;
}

StepOutcome CubeEnv::step(const State& s, Action a, State& next) const {
  next = s;
  if (a.is_pop()) {
    if (s.stack.empty()) throw std::invalid_argument("pop on empty stack");
    next.stack.pop_back();
  } else {
    if (a.code < 1 || a.code > num_cubes()) {
      throw std::invalid_argument("unknown cube id");
    }
    if (std::find(s.stack.begin(), s.stack.end(), a.code) != s.stack.end()) {
      throw std::invalid_argument("cube already in stack");
    }
    next.stack.push_back(a.code);
  }
  StepOutcome out;
  out.bonus_granted = is_exact_target(next);
  out.reward = evaluate(next) - evaluate(s) + (out.bonus_granted ? cfg_.bonus : 0.0);
  out.done = out.bonus_granted;
  return out;
}

bool CubeEnv::is_solution(const State& candidate) const {
  if (cfg_.acceptance == CubeAcceptance::exact) {
    return is_exact_target(candidate);
  }
  return evaluate(candidate) > cfg_.delta;
}

std::optional<CubeAction> CubeEnv::policy_action(const State& solution,
                                                 const State& current) const {
  if (current.stack == solution.stack) return std::nullopt;
  if (current.stack.size() < solution.stack.size() &&
      std::equal(current.stack.begin(), current.stack.end(),
                 solution.stack.begin())) {
    return CubeAction::place(solution.stack[current.stack.size()]);
  }
  return CubeAction::pop();
}

char cube_letter(int id) { return static_cast<char>('a' + id - 1); }

int cube_id(char letter) { return letter - 'a' + 1; }

std::string CubeEnv::render_state(const State& s) const {
  std::string out = "[";
  for (std::size_t i = 0; i < s.stack.size(); ++i) {
    if (i > 0) out += ",";
    out += "'";
    out += cube_letter(s.stack[i]);
    out += "'";
  }
  out += "]";
  return out;
}

namespace {

// Try to read a comma separated list of single letters (quoted or bare)
// from the bracket-free segment. Returns false if the segment does not look
// like a letter list at all.
bool read_letter_list(std::string_view seg, std::vector<char>& letters) {
  letters.clear();
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < seg.size() && std::isspace(static_cast<unsigned char>(seg[i])))
      ++i;
  };
  skip_ws();
  if (i == seg.size()) return true;  // empty list
  while (true) {
    skip_ws();
    char quote = 0;
    if (i < seg.size() && (seg[i] == '\'' || seg[i] == '"')) {
      quote = seg[i];
      ++i;
    }
    if (i >= seg.size() ||
        !std::isalpha(static_cast<unsigned char>(seg[i]))) {
      return false;
    }
    letters.push_back(seg[i]);
    ++i;
    if (quote != 0) {
      if (i >= seg.size() || seg[i] != quote) return false;
      ++i;
    }
    skip_ws();
    if (i == seg.size()) return true;
    if (seg[i] != ',') return false;
    ++i;
  }
}

}  // namespace

Parsed<CubeStackState> CubeEnv::parse_state(std::string_view text) const {
  ParseError first_error = ParseError::none;
  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    if (text[pos] != '[') continue;
    const std::size_t close = text.find(']', pos + 1);
    if (close == std::string_view::npos) break;
    const std::string_view seg = text.substr(pos + 1, close - pos - 1);
    if (seg.find('[') != std::string_view::npos) continue;  // nested: not ours
    std::vector<char> letters;
    if (!read_letter_list(seg, letters)) continue;
    CubeStackState state;
    ParseError err = ParseError::none;
    for (const char c : letters) {
      const int id = cube_id(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
      if (id < 1 || id > num_cubes()) {
        err = ParseError::bad_symbol;
        break;
      }
      if (std::find(state.stack.begin(), state.stack.end(), id) !=
          state.stack.end()) {
        err = ParseError::duplicate_symbol;
        break;
      }
      state.stack.push_back(id);
    }
    if (err == ParseError::none) {
      return Parsed<CubeStackState>::success(std::move(state));
    }
    if (first_error == ParseError::none) first_error = err;
  }
  return Parsed<CubeStackState>::failure(
      first_error == ParseError::none ? ParseError::no_structure : first_error);
}

double CubeEnv::completion_fraction(const State& s) const {
  return static_cast<double>(s.stack.size()) /
         static_cast<double>(num_cubes());
}

bool CubeEnv::matches_target_prefix(const State& s,
                                    std::vector<int>* target) const {
  for (const auto& t : cfg_.target_orders) {
    if (s.stack.size() <= t.size() &&
        std::equal(s.stack.begin(), s.stack.end(), t.begin())) {
      if (target != nullptr) *target = t;
      return true;
    }
  }
  return false;
}

}  // namespace lagr
