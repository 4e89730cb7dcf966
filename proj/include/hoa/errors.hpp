#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hoa {

/// Operands disagree on mode set or truncation grade.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid interaction, state, or run configuration.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A ratio criterion was evaluated on a state whose moments vanish.
class DegenerateStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The Fock-space truncation cannot represent the requested state.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, std::size_t suggested_dim)
      : std::runtime_error(what), suggested_dim_(suggested_dim) {}

  std::size_t suggested_dim() const noexcept { return suggested_dim_; }

 private:
  std::size_t suggested_dim_;
};

/// Numerical procedure failed (non-Hermitian input, window too large).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hoa
