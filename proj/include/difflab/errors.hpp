#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace difflab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input that parses but violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Simulation could not make progress toward its target within budget.
class ProgressError : public Error {
 public:
  using Error::Error;
};

/// Parameter estimation failed (zero-probability data, non-finite objective).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Too little data for the requested procedure.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Configuration that is well-formed but not supported.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace difflab
