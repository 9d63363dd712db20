#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agc {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, dimension mismatches, out-of-range
/// arguments. The CLI maps this family to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input parsing failure; carries the 1-based line number.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The requested quantity is mathematically undefined on the given data
/// (zero signal, all-singleton partition, frequency outside [0,2], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace agc
