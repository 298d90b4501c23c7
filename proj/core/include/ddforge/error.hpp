#pragma once

#include <stdexcept>
#include <string>

namespace ddforge {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that violate a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical routine could not reach its accuracy target (non-convergent
// quadrature, integrator drift, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace ddforge
