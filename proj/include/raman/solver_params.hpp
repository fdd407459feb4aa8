#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace raman {

// Tunables of the hybrid solver.
struct SolverParams {
  double ch = 3.0;                    // correction factor for over-calculated pumps
  double cl_initial = 0.1;            // starting correction factor for under-calculated pumps
  double step_dbm_signal = 2.0;       // signal scale-up step, dB
  double step_dbm_pump = 0.5;         // pump scale-up step, dB
  double factor_signal = 4.0;         // initial linear signal scale-down
  std::vector<double> factors_pump{1.0, 5.0, 10.0, 15.0};
  double tol = 1e-5;                  // pump boundary tolerance, W
  std::size_t max_iterations = 3000;
  std::size_t oscillation_check_interval = 100;
  double magnitude_thresh = 0.3;
  std::size_t peaks_thresh = 2;
  double c0 = 1.0;
  double dpc_multiplier_floor = 1e-3;
  int pump_ivp_substeps = 4;
  bool record_trace = true;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string("solver params: ") + name + " must be positive");
    };
    positive(ch, "ch");
    positive(cl_initial, "cl");
    positive(step_dbm_signal, "step_dbm_signal");
    positive(step_dbm_pump, "step_dbm_pump");
    positive(factor_signal, "factor_signal");
    positive(tol, "tol");
    positive(magnitude_thresh, "magnitude_thresh");
    positive(c0, "c0");
    positive(dpc_multiplier_floor, "dpc_multiplier_floor");
    if (max_iterations == 0) throw std::invalid_argument("solver params: max_iterations must be positive");
    if (oscillation_check_interval == 0) throw std::invalid_argument("solver params: oscillation_check_interval must be positive");
    if (peaks_thresh < 1) throw std::invalid_argument("solver params: peaks_thresh must be >= 1");
    if (pump_ivp_substeps < 1) throw std::invalid_argument("solver params: pump_ivp_substeps must be >= 1");
    if (factors_pump.empty() || factors_pump.front() != 1.0) {
      throw std::invalid_argument("solver params: factors_pump must start at 1");
    }
    for (std::size_t i = 1; i < factors_pump.size(); ++i) {
      if (!(factors_pump[i] > factors_pump[i - 1])) {
        throw std::invalid_argument("solver params: factors_pump must be strictly increasing");
      }
    }
  }
};

}  // namespace raman
