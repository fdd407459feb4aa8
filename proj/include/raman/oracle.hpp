#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "raman/errors.hpp"
#include "raman/link_model.hpp"
#include "raman/propagator.hpp"
#include "raman/pump_ivp.hpp"
#include "raman/rk4.hpp"

// Reference solver for the coupled two-point problem. It integrates the
// differential equations directly and shares no code with the integral-form
// kernel, so the two can be used to check each other.

namespace raman {

/// RK4 march of the full coupled system from z=0 to z=L,
///
///   dP_i/dz = d_i * (-alpha_i P_i + P_i * sum_j G_ij P_j),
///
/// with `substeps` RK4 steps per grid interval. Throws IntegrationError on
/// non-finite or non-positive power.
inline PowerProfileMatrix forward_integrate(const LinkScenario& scenario, const Grid& grid,
                                            const Eigen::VectorXd& z0_values, int substeps = 4) {
  const auto nch = static_cast<Eigen::Index>(scenario.channel_count());
  if (z0_values.size() != nch) throw std::invalid_argument("forward_integrate: z0 vector size mismatch");
  if (!(z0_values.array() > 0.0).all()) throw std::invalid_argument("forward_integrate: z0 values must be positive");
  if (substeps < 1) throw std::invalid_argument("forward_integrate: substeps must be >= 1");

  const CouplingMatrix g = build_coupling_matrix(scenario);
  const Eigen::ArrayXd alpha = scenario.attenuation().array();
  const Eigen::ArrayXd dir = scenario.direction().array();

  Eigen::VectorXd gx(nch);
  auto rhs = [&](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    gx.noalias() = g * x;
    dx = (dir * x.array() * (gx.array() - alpha)).matrix();
  };

  const auto ng = static_cast<Eigen::Index>(grid.size());
  PowerProfileMatrix out(nch, ng);
  Eigen::VectorXd x = z0_values;
  out.col(0) = x;
  Rk4Stepper rk(nch);
  for (Eigen::Index k = 1; k < ng; ++k) {
    const double h = grid.interval(static_cast<std::size_t>(k - 1)) / substeps;
    for (int s = 0; s < substeps; ++s) rk.step(rhs, x, h);
    if (!x.allFinite() || !(x.array() > 0.0).all()) {
      throw IntegrationError("forward integration produced non-finite or non-positive power",
                             grid.points[static_cast<std::size_t>(k)]);
    }
    out.col(k) = x;
  }
  return out;
}

struct ShootingOptions {
  double tol = 1e-5;        // W, on pump z=L residuals
  std::size_t max_outer = 200;
  double damping = 0.5;     // exponent on the multiplicative update
  int substeps = 4;
};

struct ShootingResult {
  PowerProfileMatrix profile;
  bool converged = false;
  std::size_t outer_iterations = 0;
  std::vector<double> residual_history;  // max |r| after each forward sweep
  std::string diagnostic;
  double wall_time_s = 0.0;
};

/// Shooting on the unknown pump powers at z=0.
///
/// Start from the undepleted pump-only profile, integrate forward, and update
/// each pump's launch value by (boundary / P(L))^damping until every residual
/// is below tol.
inline ShootingResult solve_bvp_shooting(const LinkScenario& scenario, const Grid& grid,
                                         const ShootingOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  ShootingResult res;
  auto done = [&]() -> ShootingResult {
    res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::move(res);
  };

  const Eigen::VectorXd boundary = scenario.boundary_powers();
  const auto pumps = scenario.pump_indices();
  Eigen::VectorXd z0 = boundary;

  try {
    if (!pumps.empty()) {
      Eigen::VectorXd pb(static_cast<Eigen::Index>(pumps.size()));
      for (std::size_t a = 0; a < pumps.size(); ++a) pb[static_cast<Eigen::Index>(a)] = boundary[static_cast<Eigen::Index>(pumps[a])];
      const Eigen::MatrixXd pump_only = solve_pump_only(scenario, grid, pb, opt.substeps);
      for (std::size_t a = 0; a < pumps.size(); ++a) {
        z0[static_cast<Eigen::Index>(pumps[a])] = pump_only(static_cast<Eigen::Index>(a), 0);
      }
    }

    const Eigen::Index last = static_cast<Eigen::Index>(grid.size()) - 1;
    for (res.outer_iterations = 1; res.outer_iterations <= opt.max_outer; ++res.outer_iterations) {
      res.profile = forward_integrate(scenario, grid, z0, opt.substeps);
      double worst = 0.0;
      for (std::size_t p : pumps) {
        const auto i = static_cast<Eigen::Index>(p);
        worst = std::max(worst, std::abs(res.profile(i, last) - boundary[i]));
      }
      res.residual_history.push_back(worst);
      if (worst < opt.tol) {
        res.converged = true;
        return done();
      }
      for (std::size_t p : pumps) {
        const auto i = static_cast<Eigen::Index>(p);
        z0[i] *= std::pow(boundary[i] / res.profile(i, last), opt.damping);
      }
    }
    res.outer_iterations = opt.max_outer;
    res.diagnostic = "shooting did not converge within " + std::to_string(opt.max_outer) + " outer iterations";
  } catch (const IntegrationError& e) {
    res.diagnostic = e.what();
  } catch (const DivergenceError& e) {
    res.diagnostic = e.what();
  }
  return done();
}

/// Largest |10 log10(a/b)| over all entries, in dB.
inline double max_db_error(const PowerProfileMatrix& a, const PowerProfileMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_db_error: dimension mismatch");
  const bool ok = a.allFinite() && b.allFinite() && (a.array() > 0.0).all() && (b.array() > 0.0).all();
  if (!ok) throw ComparisonInvalid("max_db_error: profiles contain non-positive or non-finite entries");
  // Difference of logs keeps the result exactly symmetric in (a, b).
  return (10.0 * (a.array().log10() - b.array().log10())).abs().maxCoeff();
}

}  // namespace raman
