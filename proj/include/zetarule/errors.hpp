#pragma once

#include <stdexcept>
#include <string>

namespace zetarule {

/// Base of every computational failure the library reports. The CLI maps
/// all of these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation requested at s = 1.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A series or quadrature could not reach the requested tolerance.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// An internal identity that must hold to working precision did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-facing parameters (a, x, truncation orders, counts).
class ParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace zetarule
