#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rydsim {

// Bad user input: config values, CLI flags, file contents. Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quantum numbers that cannot describe a physical level.
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

// A transition that no modeled coupling connects.
class SelectionRuleError : public InputError {
 public:
  using InputError::InputError;
};

// Diagnostic with a 1-based source location.
class ParseError : public InputError {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column)
      : InputError("line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Iterative solver failed to converge. Maps to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydsim
