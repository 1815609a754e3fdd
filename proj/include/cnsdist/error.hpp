#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cnsdist {

/// Malformed input text (edge lists, CSV, JSON descriptors).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Divergence, non-convergence, or a quantity that cannot be computed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument validation uses std::invalid_argument / std::out_of_range.

}  // namespace cnsdist
