#include "lagr/grid_env.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "lagr/kernels.hpp"

namespace lagr {

int GridTarget::ones() const {
  int n = 0;
  for (const auto c : cells) n += c;
  return n;
}

namespace {

GridTarget from_rows(const std::string& name,
                     const std::vector<std::string>& rows) {
  GridTarget t;
  t.name = name;
  t.height = static_cast<int>(rows.size());
  t.width = static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != t.width) {
      throw std::invalid_argument("ragged target rows");
    }
    for (const char c : row) {
      if (c != '0' && c != '1') throw std::invalid_argument("bad target cell");
      t.cells.push_back(c == '1' ? 1 : 0);
    }
  }
  return t;
}

}  // namespace

GridTarget builtin_target(const std::string& name) {
  GridTarget t;
  if (name == "oval10") {
    t = from_rows(name, {
                            "0000000000",
                            "0000000000",
                            "0001110000",
                            "0010001000",
                            "0010001000",
                            "0010001000",
                            "0010001000",
                            "0001110000",
                            "0000000000",
                            "0000000000",
                        });
  } else if (name == "triangle10") {
    t = from_rows(name, {
                            "0000000000",
                            "0000000000",
                            "0000100000",
                            "0001010000",
                            "0010001000",
                            "0100000100",
                            "1111111110",
                            "0000000000",
                            "0000000000",
                            "0000000000",
                        });
  } else if (name == "diamond5") {
    t = from_rows(name, {
                            "00100",
                            "01010",
                            "10001",
                            "01010",
                            "00100",
                        });
  } else if (name == "square5") {
    t = from_rows(name, {
                            "00000",
                            "01110",
                            "01010",
                            "01110",
                            "00000",
                        });
  } else if (name == "oval5") {
    t = from_rows(name, {
                            "00100",
                            "01010",
                            "01010",
                            "00100",
                            "00000",
                        });
  } else if (name == "cross5") {
    t = from_rows(name, {
                            "00100",
                            "00100",
                            "11111",
                            "00100",
                            "00100",
                        });
  } else {
    throw std::invalid_argument("unknown target shape: " + name);
  }
  return t;
}

GridTarget target_shape(const std::string& name, int width, int height) {
  GridTarget t = builtin_target(name);
  if (t.width != width || t.height != height) {
    throw std::invalid_argument("target " + name + " is not " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
  return t;
}

GridTarget resolve_target(const std::string& name_or_path) {
  if (name_or_path.find('/') != std::string::npos ||
      name_or_path.ends_with(".txt")) {
    return load_target_file(name_or_path);
  }
  return builtin_target(name_or_path);
}

std::vector<std::string> builtin_target_names() {
  return {"oval10", "triangle10", "diamond5", "square5", "oval5", "cross5"};
}

GridTarget load_target_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open target file: " + path);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw std::runtime_error("empty target file: " + path);
  return from_rows(std::filesystem::path(path).stem().string(), rows);
}

GridEnvConfig make_image_config(const std::string& target_name) {
  GridEnvConfig cfg;
  cfg.width = 10;
  cfg.height = 10;
  cfg.target = target_shape(target_name, 10, 10);
  cfg.mode = GridMode::image;
  cfg.delta = 0.95;
  cfg.horizon = 500;
  return cfg;
}

GridEnvConfig make_arrangement_config(const std::string& target_name) {
  GridEnvConfig cfg;
  cfg.width = 5;
  cfg.height = 5;
  cfg.target = target_shape(target_name, 5, 5);
  cfg.mode = GridMode::arrangement;
  cfg.delta = 0.99;
  cfg.horizon = 50;
  return cfg;
}

GridEnv::GridEnv(GridEnvConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.width <= 0 || cfg_.height <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (cfg_.target.width != cfg_.width || cfg_.target.height != cfg_.height) {
    throw std::invalid_argument("target dimensions do not match environment");
  }
  if (!(cfg_.delta > 0.0) || cfg_.delta > 1.0) {
    throw std::invalid_argument("delta must be in (0, 1]");
  }
}

std::string GridEnv::id() const {
  return (cfg_.mode == GridMode::image ? "image" : "arrange") +
         std::to_string(cfg_.width) + "x" + std::to_string(cfg_.height) + "-" +
         cfg_.target.name;
}

GridState GridEnv::reset() const {
  GridState s;
  s.cells.assign(static_cast<std::size_t>(num_cells()), 0);
  s.cursor = 0;
  return s;
}

int GridEnv::matched_cells(const std::vector<std::uint8_t>& cells) const {
  if (cells.size() != cfg_.target.cells.size()) {
    throw std::invalid_argument("cell buffer has wrong dimensions");
  }
  return static_cast<int>(kernels::active().count_equal_u8(
      cells.data(), cfg_.target.cells.data(), cells.size()));
}

double GridEnv::eval_cells(const std::vector<std::uint8_t>& cells) const {
  return static_cast<double>(matched_cells(cells)) /
         static_cast<double>(num_cells());
}

StepOutcome GridEnv::step(const State& s, Action a, State& next) const {
  if (a != 0 && a != 1) throw std::invalid_argument("grid action must be 0/1");
  const std::size_t cur = static_cast<std::size_t>(s.cursor);
  std::vector<std::uint8_t> proposed = s.cells;
  if (a == 1) {
    if (cfg_.mode == GridMode::image) {
      proposed[cur] ^= 1;
    } else {
      proposed[cur] = 1;
    }
  }

  next = s;
  const int prev_matched = matched_cells(s.cells);
  const int prop_matched = matched_cells(proposed);
  if (cfg_.mode == GridMode::image) {
    next.cells = std::move(proposed);
  } else if (prop_matched > prev_matched) {
    next.cells = std::move(proposed);  // drop committed
  }
  next.cursor = (s.cursor + 1) % num_cells();

  const int next_matched =
      cfg_.mode == GridMode::image ? prop_matched : matched_cells(next.cells);
  StepOutcome out;
  if (cfg_.mode == GridMode::image) {
    out.bonus_granted =
        static_cast<double>(next_matched) / num_cells() > cfg_.delta;
  } else {
    out.bonus_granted = next_matched == num_cells();
  }
  const double e_prev = static_cast<double>(prev_matched) / num_cells();
  const double e_prop = static_cast<double>(prop_matched) / num_cells();
  out.reward = e_prop - e_prev + (out.bonus_granted ? cfg_.bonus : 0.0);
  out.done = out.bonus_granted;
  return out;
}

bool GridEnv::is_solution(const State& candidate) const {
  return eval_cells(candidate.cells) > cfg_.delta;
}

std::optional<int> GridEnv::policy_action(const State& solution,
                                          const State& current) const {
  const std::size_t cur = static_cast<std::size_t>(current.cursor);
  if (cfg_.mode == GridMode::image) {
    return current.cells[cur] != solution.cells[cur] ? 1 : 0;
  }
  return (solution.cells[cur] == 1 && current.cells[cur] == 0) ? 1 : 0;
}

std::string GridEnv::render_cells(
    const std::vector<std::uint8_t>& cells) const {
  std::string out = "[";
  for (int r = 0; r < cfg_.height; ++r) {
    if (r > 0) out += ",\n";
    out += "[";
    for (int c = 0; c < cfg_.width; ++c) {
      if (c > 0) out += ",";
      out += cells[static_cast<std::size_t>(r * cfg_.width + c)] ? '1' : '0';
    }
    out += "]";
  }
  out += "]";
  return out;
}

std::string GridEnv::render_state(const State& s) const {
  return render_cells(s.cells);
}

namespace {

struct MatrixScan {
  bool structural = false;  // a complete nested list was read
  std::vector<std::vector<int>> rows;
};

// Parse a nested integer list starting at text[pos] (which must be '[').
MatrixScan scan_matrix(std::string_view text, std::size_t pos) {
  MatrixScan out;
  std::size_t i = pos + 1;
  auto skip_ws = [&] {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  skip_ws();
  while (i < text.size() && text[i] == '[') {
    ++i;
    std::vector<int> row;
    skip_ws();
    while (i < text.size() && text[i] != ']') {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return out;
      int value = 0;
      while (i < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i]))) {
        value = value * 10 + (text[i] - '0');
        ++i;
      }
      row.push_back(value);
      skip_ws();
      if (i < text.size() && text[i] == ',') {
        ++i;
        skip_ws();
      }
    }
    if (i >= text.size()) return out;
    ++i;  // consume row ']'
    out.rows.push_back(std::move(row));
    skip_ws();
    if (i < text.size() && text[i] == ',') {
      ++i;
      skip_ws();
    }
  }
  if (i < text.size() && text[i] == ']' && !out.rows.empty()) {
    out.structural = true;
  }
  return out;
}

}  // namespace

Parsed<GridState> GridEnv::parse_state(std::string_view text) const {
  ParseError first_error = ParseError::none;
  for (std::size_t pos = 0; pos + 1 < text.size(); ++pos) {
    if (text[pos] != '[') continue;
    std::size_t look = pos + 1;
    while (look < text.size() &&
           std::isspace(static_cast<unsigned char>(text[look])))
      ++look;
    if (look >= text.size() || text[look] != '[') continue;
    const MatrixScan scan = scan_matrix(text, pos);
    if (!scan.structural) continue;

    ParseError err = ParseError::none;
    if (static_cast<int>(scan.rows.size()) != cfg_.height) {
      err = ParseError::wrong_dimensions;
    }
    GridState state;
    state.cursor = 0;
    for (const auto& row : scan.rows) {
      if (err != ParseError::none) break;
      if (static_cast<int>(row.size()) != cfg_.width) {
        err = ParseError::wrong_dimensions;
        break;
      }
      for (const int v : row) {
        if (v != 0 && v != 1) {
          err = ParseError::non_binary;
          break;
        }
        state.cells.push_back(static_cast<std::uint8_t>(v));
      }
    }
    if (err == ParseError::none) {
      return Parsed<GridState>::success(std::move(state));
    }
    if (first_error == ParseError::none) first_error = err;
  }
  return Parsed<GridState>::failure(
      first_error == ParseError::none ? ParseError::no_structure : first_error);
}

std::vector<double> GridEnv::encode(const State& s) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(num_cells()) + 2);
  for (const auto c : s.cells) out.push_back(static_cast<double>(c));
  out.push_back(static_cast<double>(s.cursor / cfg_.width));  // row
  out.push_back(static_cast<double>(s.cursor % cfg_.width));  // column
  return out;
}

std::vector<double> GridEnv::encode_cells(const State& s) const {
  std::vector<double> out;
  out.reserve(s.cells.size());
  for (const auto c : s.cells) out.push_back(static_cast<double>(c));
  return out;
}

double GridEnv::completion_fraction(const State& s) const {
  const int total = cfg_.target.ones();
  if (total == 0) return 1.0;
  int correct = 0;
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    if (s.cells[i] == 1 && cfg_.target.cells[i] == 1) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace lagr
