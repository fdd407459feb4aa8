#pragma once

#include <stdexcept>
#include <string>

namespace raman {

// Raised when an iterate or an integration produces non-finite powers.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the reference integrator; carries the position where it failed.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double z_km)
      : std::runtime_error(what + " at z=" + std::to_string(z_km) + " km"), z_km_(z_km) {}

  double z_km() const noexcept { return z_km_; }

 private:
  double z_km_;
};

// Two profiles cannot be compared in dB (non-positive or non-finite entry).
class ComparisonInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace raman
