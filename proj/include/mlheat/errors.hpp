#pragma once

#include <stdexcept>
#include <string>

namespace mlheat {

/// Invalid parameters, grids or configuration files. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf, non-convergent quadrature, or a kernel that fails its mass check.
/// CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition on data (e.g. negative density
/// handed to the absorption step).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mlheat
