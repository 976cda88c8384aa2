#ifndef DMCOOL_ERRORS_HPP
#define DMCOOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dmcool {

// Parameter/precondition violations. The message names the offending field.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Kernel-level failures (non-convergence, step underflow, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Thrown when a steady-state solve is requested for a drift matrix that is
// not strictly stable; carries the offending spectral abscissa.
class UnstableSystemError : public NumericalError {
 public:
  UnstableSystemError(const std::string& msg, double max_re)
      : NumericalError(msg), max_re_eigenvalue(max_re) {}
  double max_re_eigenvalue;
};

// Config-file parse/shape problems.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dmcool

#endif
