#pragma once

#include <stdexcept>
#include <string>

namespace lexssp {

// Malformed input data: scenario files, formula text, schema violations.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Formula text that failed to parse; carries a 1-based line/column.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, int line, int column)
      : InputError(msg + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line(line),
        column(column) {}
  int line;
  int column;
};

// A construction whose size estimate exceeds its configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lexssp
