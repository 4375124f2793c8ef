#pragma once

#include <stdexcept>
#include <string>

namespace newstox {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (JSON syntax, wrong field types). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix with the wrong shape.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration or arguments (unknown setup, missing feature group, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace newstox
