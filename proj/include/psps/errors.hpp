#pragma once

#include <stdexcept>
#include <string>

namespace psps {

// Bad run configuration (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unusable input data or I/O failure (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : DataError {
  ParseError(const std::string& what, int line_number)
      : DataError("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  int line;
};

}  // namespace psps
