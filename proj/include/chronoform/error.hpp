#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chronoform {

/// Malformed input: a score file, a form string, a config line.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + ", line " + std::to_string(line)), line_(line) {}

  /// 1-based source line, 0 when the error has no line context.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Well-formed input that an analysis cannot accept (empty piece, missing key, ...).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace chronoform
