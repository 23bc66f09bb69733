#pragma once

#include <stdexcept>
#include <string>

namespace fringemag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point lies on (or numerically too close to) a current filament.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point lies strictly inside a magnet body.
class InsideBodyError : public Error {
 public:
  using Error::Error;
};

/// |B| too small for the gradient of the field magnitude to be defined.
class FieldZeroError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A precondition on numeric arguments was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (CSV contents, dataset shape).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration text could not be parsed or failed validation. `line` and
/// `column` are 1-based; zero means the location is unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, int column = 0)
      : Error(format(message, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  int line_;
  int column_;
};

class FitError : public Error {
 public:
  enum class Kind { NotConverged, AtBound, Underdetermined };

  FitError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace fringemag
