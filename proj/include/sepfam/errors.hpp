#pragma once

#include <stdexcept>
#include <string>

namespace sepfam {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scalar root solve failed to find a sign change or converge.
class NoRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data cannot support the requested fit (all values equal, too few points).
class DegenerateDataError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or unreadable user input (dataset files, config files).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer or sampler could not reach a usable result.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sepfam
