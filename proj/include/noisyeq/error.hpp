#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisyeq {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: unknown names, out-of-range indices, malformed specs.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Circuit text that does not parse. Carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A self-check inside the library failed (e.g. two independent routes disagree).
class InternalCheckError : public Error {
 public:
  using Error::Error;
};

}  // namespace noisyeq
