#pragma once

#include <stdexcept>
#include <string>

namespace navierlab {

/// Argument outside the domain where a formula is defined (t >= 1 for the
/// MEMS family, a vanishing recursion denominator, ...). Never clamped.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation was called on data that violates its stated precondition
/// (wrong family for an estimate, invalid exponent tuple, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method ran out of steps before meeting its tolerance.
class IterationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace navierlab
