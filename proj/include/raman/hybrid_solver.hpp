#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "raman/adaptive_control.hpp"
#include "raman/errors.hpp"
#include "raman/link_model.hpp"
#include "raman/propagator.hpp"
#include "raman/pump_ivp.hpp"
#include "raman/solver_params.hpp"
#include "raman/units.hpp"

namespace raman {

enum class SolveStatus { Converged, Diverged, Oscillating, IterationCapped };
enum class Stage { SignalScaleUp, PumpScaleUp, Dpc };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::Diverged: return "Diverged";
    case SolveStatus::Oscillating: return "Oscillating";
    case SolveStatus::IterationCapped: return "IterationCapped";
  }
  return "?";
}

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::SignalScaleUp: return "SignalScaleUp";
    case Stage::PumpScaleUp: return "PumpScaleUp";
    case Stage::Dpc: return "Dpc";
  }
  return "?";
}

struct TraceRecord {
  std::size_t iteration;
  Stage stage;
  Eigen::VectorXd pump_error;  // true boundary minus computed z=L power, W
};

struct SolverReport {
  SolveStatus status = SolveStatus::IterationCapped;
  std::size_t iterations = 0;
  Eigen::VectorXd final_pump_error;
  double pump_factor_used = 1.0;
  std::vector<ClChange> cl_history;
  double wall_time_s = 0.0;
  bool divergence_flag = false;  // set when every ladder entry diverged
  std::vector<TraceRecord> trace;
  std::string message;

  double max_abs_pump_error() const {
    return final_pump_error.size() == 0 ? 0.0 : final_pump_error.cwiseAbs().maxCoeff();
  }
};

struct HybridResult {
  PowerProfileMatrix profile;
  SolverReport report;
};

struct SolverState {
  PowerProfileMatrix profile;
  Stage stage = Stage::SignalScaleUp;
  bool signal_scaled_up = false;
  Eigen::VectorXd pump_boundary_scaled;  // current pump targets at z=L
  ClController cl;
  std::size_t iteration = 0;
  std::vector<double> pump0_error;  // first pump's error, indexed by iteration
  std::vector<TraceRecord> trace;
};

// ---------------------------------------------------------------------------
// Building blocks

// Rescale every pump row so its z=L value equals the matching target exactly.
inline void correct_pumps_to_boundary(PowerProfileMatrix& p, std::size_t pump_begin,
                                      const Eigen::VectorXd& pump_boundary_scaled) {
  const Eigen::Index last = p.cols() - 1;
  for (Eigen::Index i = 0; i < pump_boundary_scaled.size(); ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(pump_begin) + i;
    const double end = p(row, last);
    if (!(end > 0.0) || !std::isfinite(end)) {
      throw DivergenceError("pump " + std::to_string(i) + " has non-positive or non-finite power at z=L");
    }
    p.row(row) *= pump_boundary_scaled[i] / end;
    p(row, last) = pump_boundary_scaled[i];
  }
}

// Positive entries mean the pump arrives at z=L below its boundary.
inline Eigen::VectorXd pump_error(const PowerProfileMatrix& p, std::size_t pump_begin,
                                  const Eigen::VectorXd& true_boundary) {
  const Eigen::Index last = p.cols() - 1;
  return true_boundary - p.block(static_cast<Eigen::Index>(pump_begin), last, true_boundary.size(), 1);
}

/// Dynamic pump calibration step: row i is scaled by 1 + k * error_i / boundary_i,
/// k = cl for under-calculated pumps (error > 0) and ch otherwise. The
/// multiplier is floored at `floor` to keep rows positive.
inline void dpc_correction(PowerProfileMatrix& p, std::size_t pump_begin, const Eigen::VectorXd& error,
                           const Eigen::VectorXd& true_boundary, double ch, double cl, double floor = 1e-3) {
  for (Eigen::Index i = 0; i < error.size(); ++i) {
    const double k = error[i] > 0.0 ? cl : ch;
    const double m = std::max(1.0 + k * error[i] / true_boundary[i], floor);
    p.row(static_cast<Eigen::Index>(pump_begin) + i) *= m;
  }
}

inline SolverState initialize_state(const LinkScenario& scenario, const Grid& grid, const SolverParams& params,
                                    double factor_pump) {
  if (!(factor_pump > 0.0)) throw std::invalid_argument("initialize_state: factor_pump must be positive");
  const auto nch = static_cast<Eigen::Index>(scenario.channel_count());
  const auto ng = static_cast<Eigen::Index>(grid.size());
  const std::size_t pb = scenario.pump_begin();
  const auto np = static_cast<Eigen::Index>(scenario.pump_count());

  SolverState st;
  st.profile.resize(nch, ng);
  for (Eigen::Index i = 0; i < nch; ++i) {
    const auto& c = scenario.channels[static_cast<std::size_t>(i)];
    if (c.direction != Direction::Forward) continue;
    const double p0 = c.boundary_power_w / params.factor_signal;
    for (Eigen::Index k = 0; k < ng; ++k) {
      st.profile(i, k) = p0 * std::exp(-c.attenuation_per_km * grid.points[static_cast<std::size_t>(k)]);
    }
  }
  st.pump_boundary_scaled.resize(np);
  for (Eigen::Index a = 0; a < np; ++a) {
    st.pump_boundary_scaled[a] = scenario.channels[pb + static_cast<std::size_t>(a)].boundary_power_w / factor_pump;
  }
  if (np > 0) {
    st.profile.middleRows(static_cast<Eigen::Index>(pb), np) =
        solve_pump_only(scenario, grid, st.pump_boundary_scaled, params.pump_ivp_substeps);
  }
  st.cl.cl = params.cl_initial;
  st.pump0_error.reserve(params.max_iterations + 1);
  st.pump0_error.push_back(0.0);
  return st;
}

/// Two-stage hybrid solve at a fixed pump scale-down factor.
///
/// Stage 1 (progressive injection): starting from scaled-down signals and
/// pumps, raise the signal launch powers in dB steps, then the pump
/// boundaries, re-anchoring the pump rows to their current targets before
/// every propagation. Stage 2 (pump calibration): push each pump row toward
/// its true boundary until every |error| < tol, adapting CL when the first
/// pump's error oscillates. One iteration is one propagation.
inline HybridResult run_hybrid(const LinkScenario& scenario, const SolverParams& params, double factor_pump = 1.0) {
  const auto t0 = std::chrono::steady_clock::now();
  params.validate();
  const PropagationContext ctx(scenario);
  const std::size_t pb = scenario.pump_begin();
  const auto np = static_cast<Eigen::Index>(scenario.pump_count());
  const Eigen::VectorXd boundaries = scenario.boundary_powers();
  const Eigen::VectorXd pump_true = boundaries.segment(static_cast<Eigen::Index>(pb), np);

  HybridResult result;
  SolverReport& rep = result.report;
  rep.pump_factor_used = factor_pump;

  auto finish = [&](SolveStatus status, SolverState& st, std::string msg = {}) {
    rep.status = status;
    rep.iterations = st.iteration;
    rep.final_pump_error = st.profile.allFinite() ? pump_error(st.profile, pb, pump_true)
                                                  : Eigen::VectorXd::Constant(np, std::nan(""));
    rep.cl_history = st.cl.history;
    rep.trace = std::move(st.trace);
    rep.message = std::move(msg);
    result.profile = std::move(st.profile);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  };

  SolverState st;
  try {
    st = initialize_state(scenario, ctx.grid, params, factor_pump);
  } catch (const DivergenceError& e) {
    st.profile = PowerProfileMatrix::Constant(static_cast<Eigen::Index>(scenario.channel_count()),
                                              static_cast<Eigen::Index>(ctx.grid.size()), std::nan(""));
    return finish(SolveStatus::Diverged, st, e.what());
  }

  // Propagate once; false on non-finite output.
  auto advance = [&]() {
    st.profile = ctx.propagate(st.profile);
    ++st.iteration;
    if (!st.profile.allFinite()) return false;
    const Eigen::VectorXd err = pump_error(st.profile, pb, pump_true);
    st.pump0_error.push_back(np > 0 ? err[0] : 0.0);
    if (params.record_trace) st.trace.push_back({st.iteration, st.stage, err});
    return true;
  };
  auto capped = [&]() { return st.iteration >= params.max_iterations; };
  auto cap_status = [&]() {
    return st.cl.history.empty() ? SolveStatus::IterationCapped : SolveStatus::Oscillating;
  };

  const double signal_ratio = db_to_ratio(params.step_dbm_signal);
  const double pump_ratio = db_to_ratio(params.step_dbm_pump);

  try {
    // Signal scale-up.
    st.stage = Stage::SignalScaleUp;
    while (!st.signal_scaled_up) {
      if (capped()) return finish(cap_status(), st, "iteration cap reached during signal scale-up");
      if (np > 0) correct_pumps_to_boundary(st.profile, pb, st.pump_boundary_scaled);
      bool reached = true;
      for (Eigen::Index i = 0; i < st.profile.rows(); ++i) {
        if (scenario.channels[static_cast<std::size_t>(i)].direction != Direction::Forward) continue;
        const double target = boundaries[i];
        const double anchor = st.profile(i, 0);
        const double next = std::min(anchor * signal_ratio, target);
        st.profile.row(i) *= next / anchor;
        st.profile(i, 0) = next;
        if (next < target) reached = false;
      }
      if (!advance()) return finish(SolveStatus::Diverged, st, "non-finite power during signal scale-up");
      st.signal_scaled_up = reached;
    }

    // Pump scale-up.
    st.stage = Stage::PumpScaleUp;
    while (true) {
      if (np > 0) correct_pumps_to_boundary(st.profile, pb, st.pump_boundary_scaled);
      const bool at_target = ((st.pump_boundary_scaled - pump_true).cwiseAbs().array() < params.tol).all();
      if (capped()) return finish(cap_status(), st, "iteration cap reached during pump scale-up");
      if (at_target) {
        if (!advance()) return finish(SolveStatus::Diverged, st, "non-finite power at calibration hand-off");
        break;
      }
      for (Eigen::Index a = 0; a < np; ++a) {
        const double next = std::min(st.pump_boundary_scaled[a] * pump_ratio, pump_true[a]);
        st.profile.row(static_cast<Eigen::Index>(pb) + a) *= next / st.pump_boundary_scaled[a];
        st.pump_boundary_scaled[a] = next;
      }
      if (!advance()) return finish(SolveStatus::Diverged, st, "non-finite power during pump scale-up");
    }

    // Dynamic pump calibration.
    st.stage = Stage::Dpc;
    st.cl.last_change = st.iteration;
    while (true) {
      const Eigen::VectorXd err = pump_error(st.profile, pb, pump_true);
      if (np == 0 || err.cwiseAbs().maxCoeff() < params.tol) return finish(SolveStatus::Converged, st);
      if (capped()) return finish(cap_status(), st, "iteration cap reached during pump calibration");
      dpc_correction(st.profile, pb, err, pump_true, params.ch, st.cl.cl, params.dpc_multiplier_floor);
      if (!advance()) return finish(SolveStatus::Diverged, st, "non-finite power during pump calibration");
      if (st.iteration % params.oscillation_check_interval == 0) {
        maybe_reduce_cl(st.pump0_error, st.iteration, st.cl, params);
      }
    }
  } catch (const DivergenceError& e) {
    return finish(SolveStatus::Diverged, st, e.what());
  }
}

}  // namespace raman
