#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace codefit {

/// Unrecognizable character during lexing; carries the byte offset.
struct LexError : std::runtime_error {
  LexError(std::string msg, std::size_t offset)
      : std::runtime_error(std::move(msg)), offset(offset) {}
  std::size_t offset;
};

/// Malformed construct that could not be recovered into an opaque statement.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, std::size_t token_index, std::string expected)
      : std::runtime_error(std::move(msg)),
        token_index(token_index),
        expected(std::move(expected)) {}
  std::size_t token_index;
  std::string expected;  // comma-separated expected-set
};

/// Invalid configuration value; `field` is the offending config path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::string msg, std::string field = "")
      : std::runtime_error(std::move(msg)), field(std::move(field)) {}
  std::string field;
};

/// Input vector width does not match the model contract.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Layer index outside [1, L].
struct IndexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Paired sequences of different lengths.
struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed corpus record; carries the 1-based line number.
struct FormatError : std::runtime_error {
  FormatError(std::string msg, std::size_t line)
      : std::runtime_error(std::move(msg)), line(line) {}
  std::size_t line;
};

/// Metric undefined because one class is absent.
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace codefit
