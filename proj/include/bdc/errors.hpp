#pragma once

#include <stdexcept>
#include <string>

namespace bdc {

/// Malformed or inconsistent input data (parse failures, non-finite values,
/// simplices outside a cochain's domain).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. a threshold outside a bar).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant failed. Indicates a bug or a degenerate numeric case.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bdc
