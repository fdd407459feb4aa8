// raman_profile: solve, sweep and benchmark backward-pumped Raman power profiles.
//
//   raman_profile solve   --scenario cl.json --out run/ [--trace]
//   raman_profile sweep   --scenario cl.json --out sweep/ --powers -5,0,5 --adjustments 1,0.7,0.1 --jobs 4
//   raman_profile compare --scenario cl.json --out cmp/ --repetitions 3

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "raman/bench.hpp"
#include "raman/escalation.hpp"
#include "raman/report_io.hpp"
#include "raman/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<double> ch, cl, tol, step_km, adjustment, signal_dbm;
  std::optional<std::size_t> max_iter;
  std::vector<double> factors_pump;
};

void add_common(CLI::App* cmd, std::string& scenario, std::string& out, Overrides& o) {
  cmd->add_option("--scenario", scenario, "scenario JSON file")->required();
  cmd->add_option("--out", out, "output directory")->required();
  cmd->add_option("--ch", o.ch, "DPC correction factor for over-calculated pumps");
  cmd->add_option("--cl", o.cl, "initial DPC correction factor for under-calculated pumps");
  cmd->add_option("--tol", o.tol, "pump boundary tolerance [W]");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap per attempt");
  cmd->add_option("--step-km", o.step_km, "grid step [km]");
  cmd->add_option("--adjustment", o.adjustment, "pump power divisor");
  cmd->add_option("--signal-dbm", o.signal_dbm, "uniform signal power (or tilt mean) [dBm]");
  cmd->add_option("--factors-pump", o.factors_pump, "pump scale-down ladder, e.g. 1,5,10,15")->delimiter(',');
}

raman::ScenarioConfig load(const std::string& path, const Overrides& o) {
  auto cfg = raman::load_scenario_file(path);
  if (o.step_km) cfg.step_km = *o.step_km;
  if (o.adjustment) {
    if (!(*o.adjustment > 0.0)) throw raman::ScenarioError("--adjustment: must be positive");
    cfg.adjustment = *o.adjustment;
  }
  if (o.signal_dbm) cfg = raman::apply_sweep_point(cfg, *o.signal_dbm, cfg.adjustment, std::nullopt);
  return cfg;
}

raman::SolverParams params_from(const Overrides& o) {
  raman::SolverParams p;
  if (o.ch) p.ch = *o.ch;
  if (o.cl) p.cl_initial = *o.cl;
  if (o.tol) p.tol = *o.tol;
  if (o.max_iter) p.max_iterations = *o.max_iter;
  if (!o.factors_pump.empty()) p.factors_pump = o.factors_pump;
  p.validate();
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Raman power-profile solver"};
  app.require_subcommand(1);

  std::string scenario, out;
  Overrides ov;
  bool trace = false;
  std::vector<double> powers, adjustments, tilt_ks;
  std::size_t jobs = 1, repetitions = 1;

  auto* solve = app.add_subcommand("solve", "solve one scenario");
  add_common(solve, scenario, out, ov);
  solve->add_flag("--trace", trace, "also write per-iteration trace.csv");

  auto* sweep = app.add_subcommand("sweep", "iteration-count grid over signal power x adjustment");
  add_common(sweep, scenario, out, ov);
  sweep->add_option("--powers", powers, "signal powers [dBm]")->delimiter(',')->required();
  sweep->add_option("--adjustments", adjustments, "pump adjustment factors")->delimiter(',')->required();
  sweep->add_option("--tilt-ks", tilt_ks, "tilt scale factors (tilted templates)")->delimiter(',');
  sweep->add_option("--jobs", jobs, "worker threads (0 = hardware)");

  auto* compare = app.add_subcommand("compare", "hybrid solver vs shooting oracle");
  add_common(compare, scenario, out, ov);
  compare->add_option("--repetitions", repetitions, "timed runs per method")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto cfg = load(scenario, ov);
    const auto params = params_from(ov);
    fs::create_directories(out);

    if (*solve) {
      const auto sc = cfg.build();
      const auto res = raman::run_with_pump_factor_escalation(sc, params);
      const auto grid = raman::build_grid(sc.length_km, sc.step_km);
      auto prof = open_out(fs::path(out) / "profile.csv");
      raman::write_profile_csv(prof, sc, grid, res.profile);
      auto rep = open_out(fs::path(out) / "report.txt");
      raman::write_report(rep, res.report);
      if (trace) {
        auto tr = open_out(fs::path(out) / "trace.csv");
        raman::write_trace_csv(tr, res.report);
      }
      std::cout << raman::to_string(res.report.status) << " after " << res.report.iterations
                << " iterations (pump factor " << res.report.pump_factor_used << ")\n";
      return raman::exit_code(res.report.status);
    }

    if (*sweep) {
      raman::SweepSpec spec{powers, adjustments, tilt_ks, 1};
      if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
      const auto res = raman::run_sweep(cfg, spec, params, jobs);
      auto f = open_out(fs::path(out) / "sweep.csv");
      raman::write_sweep_csv(f, res);
      raman::write_sweep_csv(std::cout, res);
      return 0;
    }

    const auto sc = cfg.build();
    const auto rec = raman::run_compare(sc, params, repetitions, {}, fs::path(scenario).stem().string());
    auto csv = open_out(fs::path(out) / "comparison.csv");
    raman::write_comparison_csv(csv, rec);
    auto sum = open_out(fs::path(out) / "summary.txt");
    raman::write_comparison_summary(sum, rec);
    raman::write_comparison_summary(std::cout, rec);
    return raman::exit_code(rec.hybrid_status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
