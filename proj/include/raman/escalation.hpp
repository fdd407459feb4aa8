#pragma once

#include "raman/hybrid_solver.hpp"

namespace raman {

/// Runs the hybrid solver with each pump scale-down factor in turn, starting
/// from params.factors_pump[0] and stopping at the first run that does not
/// diverge. When every factor diverges the last report is returned with
/// divergence_flag set. Each attempt starts from scratch.
inline HybridResult run_with_pump_factor_escalation(const LinkScenario& scenario, const SolverParams& params) {
  params.validate();
  HybridResult last;
  double elapsed = 0.0;
  for (double factor : params.factors_pump) {
    last = run_hybrid(scenario, params, factor);
    elapsed += last.report.wall_time_s;
    if (last.report.status != SolveStatus::Diverged) {
      last.report.wall_time_s = elapsed;
      return last;
    }
  }
  last.report.divergence_flag = true;
  last.report.wall_time_s = elapsed;
  return last;
}

}  // namespace raman
