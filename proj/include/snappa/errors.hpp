#pragma once

#include <stdexcept>
#include <string>

namespace snappa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or Hilbert-space dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant (norm, trace, selectivity, step size, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Configuration text could not be parsed or failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical fit or search did not produce an acceptable answer.
class FitError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best) : Error(what), best_(best) {}
  double best() const { return best_; }

 private:
  double best_;
};

/// Warnings (truncation, conditioning) go through a replaceable sink.
using WarningHandler = void (*)(const std::string&);
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace snappa
