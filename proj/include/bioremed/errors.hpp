#pragma once

#include <stdexcept>
#include <string>

namespace bioremed {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A root-finder, quadrature or integrator did not converge.
/// `where()` carries the abscissa (concentration or time) at which it failed.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double where)
      : Error(what + " (at " + std::to_string(where) + ")"), where_(where) {}

  double where() const noexcept { return where_; }

 private:
  double where_;
};

/// A caller broke a precondition (inadmissible control, bad parameters).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A quantity was requested outside its domain of definition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Every candidate of a search failed to reach the target.
class InfeasibleSearch : public Error {
 public:
  using Error::Error;
};

/// A trajectory that never reached the target was given where t_f is needed.
class NoTarget : public Error {
 public:
  using Error::Error;
};

/// Trajectory samples are too sparse for interpolation.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace bioremed
