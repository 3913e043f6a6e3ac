#pragma once

#include <optional>
#include <string>

namespace lagr {

enum class ParseError {
  none = 0,
  no_structure,       // nothing list/matrix shaped in the text
  bad_symbol,         // a token outside the environment's alphabet
  duplicate_symbol,   // repeated cube letter
  wrong_dimensions,   // matrix does not match the environment's W x H
  non_binary,         // matrix entry outside {0, 1}
};

const char* parse_error_name(ParseError e);

template <typename T>
struct Parsed {
  std::optional<T> value;
  ParseError error = ParseError::none;

  bool ok() const { return value.has_value(); }

  static Parsed success(T v) { return {std::move(v), ParseError::none}; }
  static Parsed failure(ParseError e) { return {std::nullopt, e}; }
};

struct StepOutcome {
  double reward = 0.0;
  bool done = false;         // true only on a bonus-granting terminal step
  bool bonus_granted = false;
};

}  // namespace lagr
