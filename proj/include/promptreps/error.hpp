#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace promptreps {

/// Base class for every error the engine raises. The CLI maps each
/// subclass onto its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON, TSV, TREC lines). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& detail, std::size_t line, const std::string& file = {})
      : Error((file.empty() ? "" : file + ":") + "line " + std::to_string(line) + ": " + detail),
        detail_(detail),
        line_(line) {}

  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string detail_;
  std::size_t line_;
};

/// Well-formed input that violates a schema rule (missing field, empty
/// vector, inconsistent dimension, duplicate id).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Index construction failures.
class BuildError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration or invalid arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File-system and on-disk format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace promptreps
