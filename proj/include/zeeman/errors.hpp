#pragma once

#include <stdexcept>
#include <string>

namespace zeeman {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dense-oracle element was queried within operator reach of the truncation edge.
class CutoffTooSmall : public Error {
 public:
  using Error::Error;
};

/// Coulomb centre or Bohlin origin, where the maps are undefined.
class SingularOrigin : public Error {
 public:
  using Error::Error;
};

/// The integrand or field has not decayed at the boundary of the domain.
class DomainTooSmall : public Error {
 public:
  using Error::Error;
};

/// A sampled field has too few nodes for the finite-difference stencil.
class NonDifferentiable : public Error {
 public:
  using Error::Error;
};

/// A truncated series did not settle before its maximum order.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature stalled above the requested tolerance.
class ToleranceNotMet : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace zeeman
