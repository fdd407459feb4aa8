#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "raman/escalation.hpp"
#include "raman/oracle.hpp"
#include "raman/report_io.hpp"
#include "raman/scenario_io.hpp"

namespace raman {

struct SweepSpec {
  std::vector<double> signal_powers_dbm;
  std::vector<double> adjustments;
  std::vector<double> tilt_ks;  // optional; only meaningful for tilted templates
  std::size_t repetitions = 1;

  void validate() const {
    if (signal_powers_dbm.empty()) throw std::invalid_argument("sweep: no signal powers");
    if (adjustments.empty()) throw std::invalid_argument("sweep: no adjustments");
    if (repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");
    for (double a : adjustments) {
      if (!(a > 0.0)) throw std::invalid_argument("sweep: adjustments must be positive");
    }
  }
};

// Template with one sweep point applied: signal power becomes the mean of a
// tilted template (with the given k) or a uniform level otherwise.
inline ScenarioConfig apply_sweep_point(ScenarioConfig cfg, double signal_dbm, double adjustment,
                                        std::optional<double> tilt_k) {
  if (auto* t = std::get_if<TiltPower>(&cfg.signal_power)) {
    t->mean_dbm = signal_dbm;
    t->k = tilt_k.value_or(t->k);
  } else {
    cfg.signal_power = UniformPower{signal_dbm};
  }
  cfg.adjustment = adjustment;
  return cfg;
}

struct SweepCell {
  double tilt_k = 1.0;
  double signal_dbm = 0.0;
  double adjustment = 1.0;
  SolverReport report;
};

struct SweepResult {
  SweepSpec spec;
  bool has_tilt = false;
  std::vector<SweepCell> cells;  // row-major: (tilt_k, signal) rows x adjustment columns
};

// Runs every cell; `jobs` worker threads pull cells by index, so the result
// does not depend on scheduling.
inline SweepResult run_sweep(const ScenarioConfig& tmpl, const SweepSpec& spec, const SolverParams& params,
                             std::size_t jobs = 1) {
  spec.validate();
  SweepResult out;
  out.spec = spec;
  out.has_tilt = !spec.tilt_ks.empty();
  const std::vector<std::optional<double>> ks =
      out.has_tilt ? std::vector<std::optional<double>>(spec.tilt_ks.begin(), spec.tilt_ks.end())
                   : std::vector<std::optional<double>>{std::nullopt};
  for (const auto& k : ks) {
    for (double s : spec.signal_powers_dbm) {
      for (double a : spec.adjustments) out.cells.push_back({k.value_or(1.0), s, a, {}});
    }
  }

  SolverParams quiet = params;
  quiet.record_trace = false;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < out.cells.size(); i = next++) {
      auto& c = out.cells[i];
      const LinkScenario sc =
          (out.has_tilt ? apply_sweep_point(tmpl, c.signal_dbm, c.adjustment, c.tilt_k)
                        : apply_sweep_point(tmpl, c.signal_dbm, c.adjustment, std::nullopt))
              .build();
      c.report = run_with_pump_factor_escalation(sc, quiet).report;
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(out.cells.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  if (r.has_tilt) os << "tilt_k,";
  os << "signal_dbm";
  for (double a : r.spec.adjustments) os << ',' << format_number(a);
  os << '\n';
  const std::size_t ncol = r.spec.adjustments.size();
  for (std::size_t row = 0; row * ncol < r.cells.size(); ++row) {
    const auto& first = r.cells[row * ncol];
    if (r.has_tilt) os << format_number(first.tilt_k) << ',';
    os << format_number(first.signal_dbm);
    for (std::size_t c = 0; c < ncol; ++c) os << ',' << sweep_cell(r.cells[row * ncol + c].report);
    os << '\n';
  }
}

struct ComparisonRecord {
  std::string scenario_id;
  SolveStatus hybrid_status = SolveStatus::IterationCapped;
  std::size_t hybrid_iterations = 0;
  double pump_factor_used = 1.0;
  double hybrid_seconds = 0.0;
  bool oracle_converged = false;
  double oracle_seconds = 0.0;
  std::optional<double> max_db_error;  // empty = invalid comparison
  std::optional<double> time_gain;     // only when both methods converged
  std::string oracle_diagnostic;
};

/// Solves `scenario` `repetitions` times with each method and averages the
/// wall times measured around the solve calls.
inline ComparisonRecord run_compare(const LinkScenario& scenario, const SolverParams& params, std::size_t repetitions,
                                    const ShootingOptions& shooting = {}, std::string id = "scenario") {
  if (repetitions < 1) throw std::invalid_argument("compare: repetitions must be >= 1");
  using clock = std::chrono::steady_clock;
  const Grid grid = build_grid(scenario.length_km, scenario.step_km);
  SolverParams quiet = params;
  quiet.record_trace = false;

  ComparisonRecord rec;
  rec.scenario_id = std::move(id);
  HybridResult hybrid;
  double hybrid_total = 0.0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    hybrid = run_with_pump_factor_escalation(scenario, quiet);
    hybrid_total += std::chrono::duration<double>(clock::now() - t0).count();
  }
  ShootingResult oracle;
  double oracle_total = 0.0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    oracle = solve_bvp_shooting(scenario, grid, shooting);
    oracle_total += std::chrono::duration<double>(clock::now() - t0).count();
  }

  rec.hybrid_status = hybrid.report.status;
  rec.hybrid_iterations = hybrid.report.iterations;
  rec.pump_factor_used = hybrid.report.pump_factor_used;
  rec.hybrid_seconds = hybrid_total / static_cast<double>(repetitions);
  rec.oracle_converged = oracle.converged;
  rec.oracle_seconds = oracle_total / static_cast<double>(repetitions);
  rec.oracle_diagnostic = oracle.diagnostic;
  const bool both = oracle.converged && hybrid.report.status == SolveStatus::Converged;
  if (both) {
    try {
      rec.max_db_error = max_db_error(hybrid.profile, oracle.profile);
    } catch (const ComparisonInvalid&) {
      rec.max_db_error.reset();
    }
    rec.time_gain = rec.oracle_seconds / rec.hybrid_seconds;
  }
  return rec;
}

inline void write_comparison_csv(std::ostream& os, const ComparisonRecord& r) {
  os << "scenario,hybrid_status,hybrid_iterations,pump_factor_used,hybrid_seconds,oracle_converged,oracle_seconds,"
        "max_db_error,time_gain\n";
  os << r.scenario_id << ',' << to_string(r.hybrid_status) << ',' << r.hybrid_iterations << ','
     << format_number(r.pump_factor_used) << ',' << format_number(r.hybrid_seconds) << ','
     << (r.oracle_converged ? 1 : 0) << ',' << format_number(r.oracle_seconds) << ','
     << (r.max_db_error ? format_number(*r.max_db_error) : std::string("invalid")) << ','
     << (r.time_gain ? format_number(*r.time_gain) : std::string("")) << '\n';
}

inline void write_comparison_summary(std::ostream& os, const ComparisonRecord& r) {
  os << "scenario          " << r.scenario_id << '\n'
     << "hybrid            " << to_string(r.hybrid_status) << " after " << r.hybrid_iterations
     << " iterations (pump factor " << format_number(r.pump_factor_used) << "), " << r.hybrid_seconds << " s\n"
     << "shooting oracle   " << (r.oracle_converged ? "converged" : "failed") << ", " << r.oracle_seconds << " s\n";
  if (!r.oracle_diagnostic.empty()) os << "oracle diagnostic " << r.oracle_diagnostic << '\n';
  os << "max |error|       " << (r.max_db_error ? format_number(*r.max_db_error) + " dB" : std::string("invalid")) << '\n';
  if (r.time_gain) os << "time gain         " << *r.time_gain << '\n';
}

}  // namespace raman
