#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "raman/solver_params.hpp"

namespace raman {

struct Peak {
  std::size_t index;
  double value;
};

// Strict interior local maxima. Endpoints and plateaus never qualify.
inline std::vector<Peak> find_peaks(std::span<const double> series) {
  std::vector<Peak> peaks;
  for (std::size_t j = 1; j + 1 < series.size(); ++j) {
    if (series[j] > series[j - 1] && series[j] > series[j + 1]) peaks.push_back({j, series[j]});
  }
  return peaks;
}

struct ClChange {
  std::size_t iteration;
  double cl;
};

// Lower correction factor and the bookkeeping of its reductions.
struct ClController {
  double cl = 0.1;
  std::size_t last_change = 0;
  std::vector<ClChange> history;
};

/// Oscillation test on the first pump's error trace.
///
/// `pump0_error` is indexed by iteration; the window examined is
/// [last_change, iteration]. Peaks smaller than magnitude_thresh times the
/// window's largest magnitude are ignored. If more than peaks_thresh remain,
/// CL is divided by c0 * count and last_change moves to `iteration`.
/// Returns true when CL was reduced.
inline bool maybe_reduce_cl(std::span<const double> pump0_error, std::size_t iteration, ClController& ctl,
                            const SolverParams& params) {
  if (iteration < ctl.last_change || iteration >= pump0_error.size()) return false;
  const auto window = pump0_error.subspan(ctl.last_change, iteration - ctl.last_change + 1);
  if (window.empty()) return false;

  double max_abs = 0.0;
  for (double v : window) max_abs = std::max(max_abs, std::abs(v));
  const double threshold = params.magnitude_thresh * max_abs;

  std::size_t significant = 0;
  for (const auto& p : find_peaks(window)) {
    if (p.value > threshold) ++significant;
  }
  if (significant <= params.peaks_thresh) return false;

  ctl.cl /= params.c0 * static_cast<double>(significant);
  ctl.last_change = iteration;
  ctl.history.push_back({iteration, ctl.cl});
  return true;
}

}  // namespace raman
