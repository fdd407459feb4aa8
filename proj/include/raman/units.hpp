#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace raman {

// dBm <-> W
inline double dbm_to_watt(double dbm) {
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

inline double watt_to_dbm(double watt) {
  if (!(watt > 0.0)) {
    throw std::domain_error("watt_to_dbm: power must be positive, got " + std::to_string(watt));
  }
  return 10.0 * std::log10(watt) + 30.0;
}

// Linear attenuation coefficient (1/km) from a loss figure in dB/km.
inline double db_per_km_to_linear(double db_per_km) {
  return db_per_km / (10.0 * std::numbers::log10e);
}

// Multiplicative factor for a gain of `db` decibels.
inline double db_to_ratio(double db) {
  return std::pow(10.0, db / 10.0);
}

}  // namespace raman
