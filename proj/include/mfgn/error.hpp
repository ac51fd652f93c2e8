// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfgn {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (query, model file, dataset, schema, corruption spec).
/// Line and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    std::string s = "line " + std::to_string(line);
    if (column != 0) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

/// Values that disagree with an attribute schema: unknown names, kind mismatches, arity.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument outside its domain (inverted interval, negative sigma, bad weights).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The evidence has zero likelihood under every model component.
class ZeroEvidenceError : public Error {
 public:
  using Error::Error;
};

/// A well-formed request that the closed-form machinery does not support.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// EM could not produce a model from the given table.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfgn
