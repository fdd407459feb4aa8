#pragma once

#include <vector>

#include "raman/link_model.hpp"

namespace raman::test {

// A short link with a few signals and two backward pumps; solves in milliseconds.
inline LinkScenario small_link(double signal_dbm = 0.0, double pump_mw = 300.0, double length_km = 20.0,
                               double step_km = 0.1, RamanGainModel gain = RamanGainModel::triangular()) {
  LinkOptions opt;
  opt.length_km = length_km;
  opt.step_km = step_km;
  opt.gain_model = gain;
  PumpSet pumps{{205.0, 203.0}, {pump_mw, pump_mw * 0.8}};
  return assemble_scenario(band(190.0, 4, 500.0), UniformPower{signal_dbm}, pumps, 1.0, opt);
}

inline LinkScenario signals_only(double length_km = 10.0, double step_km = 0.1) {
  LinkOptions opt;
  opt.length_km = length_km;
  opt.step_km = step_km;
  return assemble_scenario({190.0, 195.0, 200.0}, UniformPower{10.0}, PumpSet{}, 1.0, opt);
}

}  // namespace raman::test
