#pragma once

// Exception hierarchy shared by every fsc module. Numerical failures derive
// from NumericalError so callers (the CLI in particular) can map them onto a
// single exit code.

#include <stdexcept>
#include <string>
#include <vector>

namespace fsc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: non-positive input to a special function, invalid config.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested behaviour outside the implemented subset.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Malformed input files and CLI usage problems.
class InputError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  NotPositiveDefinite(int pivot, double value)
      : NumericalError("matrix is not positive definite (pivot " + std::to_string(pivot) +
                       " = " + std::to_string(value) + ")"),
        pivot_(pivot) {}

  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

class NoBracket : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateComponent : public NumericalError {
 public:
  explicit DegenerateComponent(int component, double mass = 0.0)
      : NumericalError("degenerate component " + std::to_string(component + 1) +
                       " (mass " + std::to_string(mass) + ")"),
        component_(component) {}

  int component() const noexcept { return component_; }

 private:
  int component_;
};

class TooFewPoints : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Every EM chain of a fit failed; `causes()` holds one message per chain.
class FitFailed : public NumericalError {
 public:
  explicit FitFailed(std::vector<std::string> causes)
      : NumericalError(describe(causes)), causes_(std::move(causes)) {}

  const std::vector<std::string>& causes() const noexcept { return causes_; }

 private:
  static std::string describe(const std::vector<std::string>& causes) {
    std::string msg = "fit failed";
    for (std::size_t i = 0; i < causes.size(); ++i) {
      msg += (i == 0 ? ": " : "; ");
      msg += "[start " + std::to_string(i) + "] " + causes[i];
    }
    return msg;
  }

  std::vector<std::string> causes_;
};

}  // namespace fsc
