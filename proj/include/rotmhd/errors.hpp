// Exception types shared by every module.
#pragma once

#include <stdexcept>
#include <string>

namespace rotmhd {

// Invalid grid, config file or parameter combination.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A hypothesis on exponents or parameters was violated.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An input broke a structural invariant (e.g. divergence-free expected).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-form eigen machinery requested on a mode where det(D) = 0 or xi = 0.
class DegenerateModeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite values or blow-up detected while integrating.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rotmhd
