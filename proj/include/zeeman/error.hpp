#pragma once

#include <stdexcept>
#include <string>

namespace zeeman {

/// Argument outside the mathematical domain of an operation (F < 1, odd N, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input fails a structural check (normalization, mismatched sizes).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine produced an inconsistent result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds a hard resource cap (e.g. Hilbert-space dimension).
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace zeeman
