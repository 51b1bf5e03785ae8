#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mld {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (ARFF, XML, config). Carries a 1-based line number when known.
class ParseError : public Error {
  public:
    ParseError(std::string message, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// Structurally valid input that violates a schema rule (duplicate labels, arity mismatch, ...).
class SchemaError : public Error {
  public:
    using Error::Error;
};

/// Invalid configuration or parameter value. The message names the offending field.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace mld
