#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "raman/hybrid_solver.hpp"
#include "raman/link_model.hpp"
#include "raman/propagator.hpp"
#include "raman/units.hpp"

namespace raman {

// Shortest round-trip decimal form; independent of the global locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_number(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string channel_label(double frequency_thz) { return format_number(frequency_thz) + "THz"; }

/// Profile CSV: header `z_km,<f>THz,...`, one row per grid point, powers in dBm.
inline void write_profile_csv(std::ostream& os, const LinkScenario& scenario, const Grid& grid,
                              const PowerProfileMatrix& p) {
  os << "z_km";
  for (const auto& c : scenario.channels) os << ',' << channel_label(c.center_frequency_thz);
  os << '\n';
  for (Eigen::Index k = 0; k < p.cols(); ++k) {
    os << format_number(grid.points[static_cast<std::size_t>(k)]);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double w = p(i, k);
      os << ',' << (w > 0.0 && std::isfinite(w) ? format_number(watt_to_dbm(w)) : std::string("nan"));
    }
    os << '\n';
  }
}

struct ProfileTable {
  std::vector<double> z_km;
  std::vector<double> frequency_thz;
  PowerProfileMatrix watts;
};

inline ProfileTable read_profile_csv(std::istream& is) {
  ProfileTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("profile csv: empty input");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "z_km") throw std::invalid_argument("profile csv: header must start with z_km");
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h.size() < 4 || h.substr(h.size() - 3) != "THz") throw std::invalid_argument("profile csv: bad column label " + h);
    t.frequency_thz.push_back(parse_number(std::string_view(h).substr(0, h.size() - 3)));
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw std::invalid_argument("profile csv: ragged row");
    t.z_km.push_back(parse_number(cells[0]));
    std::vector<double> r;
    for (std::size_t i = 1; i < cells.size(); ++i) r.push_back(dbm_to_watt(parse_number(cells[i])));
    rows.push_back(std::move(r));
  }
  const auto nch = static_cast<Eigen::Index>(t.frequency_thz.size());
  t.watts.resize(nch, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (Eigen::Index i = 0; i < nch; ++i) t.watts(i, static_cast<Eigen::Index>(k)) = rows[k][static_cast<std::size_t>(i)];
  }
  return t;
}

inline void write_report(std::ostream& os, const SolverReport& r) {
  os << "status: " << to_string(r.status) << '\n';
  os << "iterations: " << r.iterations << '\n';
  os << "pump_factor_used: " << format_number(r.pump_factor_used) << '\n';
  os << "divergence_flag: " << (r.divergence_flag ? 1 : 0) << '\n';
  os << "wall_time_s: " << format_number(r.wall_time_s) << '\n';
  os << "final_pump_error_w:";
  for (Eigen::Index i = 0; i < r.final_pump_error.size(); ++i) os << ' ' << format_number(r.final_pump_error[i]);
  os << '\n';
  os << "cl_history:";
  for (const auto& c : r.cl_history) os << ' ' << c.iteration << ':' << format_number(c.cl);
  os << '\n';
  if (!r.message.empty()) os << "message: " << r.message << '\n';
}

inline void write_trace_csv(std::ostream& os, const SolverReport& r) {
  const Eigen::Index np = r.trace.empty() ? 0 : r.trace.front().pump_error.size();
  os << "iteration,stage";
  for (Eigen::Index i = 0; i < np; ++i) os << ",pump_error_" << i << "_w";
  os << '\n';
  for (const auto& t : r.trace) {
    os << t.iteration << ',' << to_string(t.stage);
    for (Eigen::Index i = 0; i < t.pump_error.size(); ++i) os << ',' << format_number(t.pump_error[i]);
    os << '\n';
  }
}

// Sweep cell: iteration count, or the "Div"/"Osc" sentinels.
inline std::string sweep_cell(const SolverReport& r) {
  switch (r.status) {
    case SolveStatus::Converged: return std::to_string(r.iterations);
    case SolveStatus::Diverged: return "Div";
    case SolveStatus::Oscillating:
    case SolveStatus::IterationCapped: return "Osc";
  }
  return "?";
}

// Process exit code for a finished solve.
inline int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return 0;
    case SolveStatus::Diverged: return 2;
    case SolveStatus::Oscillating:
    case SolveStatus::IterationCapped: return 3;
  }
  return 1;
}

}  // namespace raman
