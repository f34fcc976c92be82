#pragma once

#include <stdexcept>
#include <string>

namespace certsgd {

// Invalid parameters or construction preconditions (alpha domain, gamma
// domain, infeasible start points, mismatched dimensions).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quantity that requires the exact optimum (oracle mode) was requested on a
// problem that does not carry one, or an operation is not supported for the
// given schedule kind.
class Unavailable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Nonfinite gradient or objective encountered along a trajectory.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stopping horizon that cannot be reached within 2^63 iterations.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace certsgd
