#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kcg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Out-of-range ids, mismatched sizes, inconsistent states.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Calling an operation in a state where it is not allowed (e.g. re-inviting a node).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An enumeration oracle refused an instance with too many random variables.
class SizeError : public Error {
 public:
  SizeError(std::size_t variables, std::size_t cap)
      : Error("instance has " + std::to_string(variables) +
              " random variables, enumeration cap is " + std::to_string(cap)),
        variables_(variables) {}

  std::size_t variables() const noexcept { return variables_; }

 private:
  std::size_t variables_;
};

/// Invalid experiment or model configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kcg
