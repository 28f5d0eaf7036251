#pragma once

#include <stdexcept>
#include <string>

namespace nslog {

/// Argument outside the mathematical domain of a formula (s <= 1/2, q <= 3, x < 0 ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration: bad grid, unsupported parameter combination, parse failure.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A field-level precondition failed (e.g. the input is not divergence-free).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite samples or a malformed snapshot payload.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: divergence, step-size underflow, failed fit.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation past a finite-time singularity.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double t_star)
      : NumericalError(what), t_star_(t_star) {}
  double t_star() const noexcept { return t_star_; }

 private:
  double t_star_;
};

/// Solver produced NaN/Inf; carries the simulation time at which it was detected.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double t)
      : NumericalError(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nslog
