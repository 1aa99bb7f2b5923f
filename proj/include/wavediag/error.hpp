// Exception hierarchy shared by every wavediag module.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavediag {

/// Base of all library errors. `kind()` is a stable, machine-readable tag used
/// by the CLI as the error prefix.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

/// A precondition on an argument was violated.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

/// Malformed textual input (CSV, config). `row()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0)
      : Error("parse", row ? "row " + std::to_string(row) + ": " + what : what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Input for which the requested statistic is undefined (zero variance, ...).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error("degenerate", what) {}
};

/// A data structure violates its own invariants.
class StructureError : public Error {
 public:
  explicit StructureError(const std::string& what) : Error("structure", what) {}
};

/// A model file could not be loaded.
class ModelLoadError : public Error {
 public:
  explicit ModelLoadError(const std::string& what) : Error("model", what) {}
};

/// Filesystem failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace wavediag
