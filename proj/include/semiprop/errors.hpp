// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace semiprop {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed system description or run configuration. `path` is a JSON
/// pointer to the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// The integrator could not advance (blow-up or stiffness).
class StepSizeUnderflow : public Error {
 public:
  StepSizeUnderflow(double reached, const std::string& what)
      : Error(what), reached_(reached) {}
  /// Time at which integration stalled; an estimate of the blow-up time.
  double blowup_time() const noexcept { return reached_; }

 private:
  double reached_;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// The boundary-value Jacobian is (numerically) singular: the endpoints are
/// conjugate along the path and the path is degenerate.
class DegenerateJacobian : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  QuadratureNotConverged(double value, double error, const std::string& what)
      : Error(what), value_(value), error_(error) {}
  double value() const noexcept { return value_; }
  double error() const noexcept { return error_; }

 private:
  double value_;
  double error_;
};

}  // namespace semiprop
