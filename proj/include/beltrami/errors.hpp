#pragma once

#include <stdexcept>
#include <string>

namespace beltrami {

// Caller supplied a value outside the documented argument range.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs are valid in isolation but violate an operation's precondition
// (for example a quadrature grid too coarse for the requested point).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.3.0";

}  // namespace beltrami
