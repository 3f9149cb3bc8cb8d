#pragma once

#include <stdexcept>
#include <string>

namespace typent {

/// Argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request is well-formed but too large for dense simulation.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is valid but outside what an operation supports (e.g. non-basis
/// initial state for the Pauli chain).
class UnsupportedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace typent
