#pragma once

#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

#include "raman/errors.hpp"
#include "raman/link_model.hpp"
#include "raman/rk4.hpp"

namespace raman {

/// Pump-only initial profile.
///
/// Integrates the backward pumps from z=L (where they equal `pump_boundary`)
/// down to z=0, keeping only pump-pump Raman terms. In s = L - z the backward
/// equation reads dP/ds = -alpha P + (G_pp P) .* P, so the march is forward
/// in s. Returns one row per pump, sampled on `grid`.
inline Eigen::MatrixXd solve_pump_only(const LinkScenario& scenario, const Grid& grid,
                                       const Eigen::VectorXd& pump_boundary, int substeps = 4) {
  const auto pumps = scenario.pump_indices();
  const auto np = static_cast<Eigen::Index>(pumps.size());
  if (np == 0) throw std::invalid_argument("solve_pump_only: scenario has no pumps");
  if (pump_boundary.size() != np) throw std::invalid_argument("solve_pump_only: boundary size mismatch");
  if (!(pump_boundary.array() > 0.0).all()) throw std::invalid_argument("solve_pump_only: boundaries must be positive");
  if (substeps < 1) throw std::invalid_argument("solve_pump_only: substeps must be >= 1");

  const CouplingMatrix g_full = build_coupling_matrix(scenario);
  Eigen::MatrixXd g(np, np);
  Eigen::VectorXd alpha(np);
  for (Eigen::Index a = 0; a < np; ++a) {
    const auto ia = static_cast<Eigen::Index>(pumps[static_cast<std::size_t>(a)]);
    alpha[a] = scenario.channels[static_cast<std::size_t>(ia)].attenuation_per_km;
    for (Eigen::Index b = 0; b < np; ++b) g(a, b) = g_full(ia, static_cast<Eigen::Index>(pumps[static_cast<std::size_t>(b)]));
  }

  auto rhs = [&](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx = (-alpha.array() * x.array() + (g * x).array() * x.array()).matrix();
  };

  const auto ng = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd out(np, ng);
  Eigen::VectorXd x = pump_boundary;
  out.col(ng - 1) = x;
  Rk4Stepper rk(np);
  for (Eigen::Index k = ng - 1; k > 0; --k) {
    const double h = grid.interval(static_cast<std::size_t>(k - 1)) / substeps;
    for (int s = 0; s < substeps; ++s) rk.step(rhs, x, h);
    if (!x.allFinite()) {
      throw DivergenceError("pump-only integration produced non-finite power; pump powers too high");
    }
    out.col(k - 1) = x;
  }
  return out;
}

}  // namespace raman
