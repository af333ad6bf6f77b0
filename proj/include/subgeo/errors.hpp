#pragma once

#include <stdexcept>
#include <string>

namespace subgeo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operation (non-normal, non-Hermitian, not horizontal, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A norm-radius precondition was violated.
class RadiusError : public Error {
 public:
  using Error::Error;
};

/// Principal logarithm requested at an eigenvalue too close to -1.
class BranchError : public Error {
 public:
  using Error::Error;
};

/// An element was required to lie in M1 but does not.
class MembershipError : public Error {
 public:
  using Error::Error;
};

/// The basic construction or one of its defining properties failed.
class ConstructionError : public Error {
 public:
  ConstructionError(int property, const std::string& what)
      : Error(what), property_(property) {}
  /// Index of the failing basic-construction property (0 for Markov/trace defects).
  int property() const noexcept { return property_; }

 private:
  int property_;
};

/// Iterative solver did not reach its residual target.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Post-hoc verification of a discretized computation failed; a finer grid is needed.
class RefinementError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (a result that should hold by construction did not).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace subgeo
