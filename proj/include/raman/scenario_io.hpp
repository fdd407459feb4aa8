#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "raman/link_model.hpp"
#include "raman/units.hpp"

// Scenario files are JSON objects with sections:
//
//   link        { length_km, step_km }
//   signals     { frequency_thz: [...] | bands: [{start_thz, count, spacing_ghz}]
//                 | start_thz, count, spacing_ghz;
//                 power_dbm: scalar | [...] | {mean_dbm, tilt_db, k} }
//   pumps       { frequency_thz: [...], power_mw: [...], adjustment }      (optional)
//   raman       "triangular" | {model: "triangular", peak_gain, peak_shift_thz, cutoff_thz,
//                 frequency_scaling} | {model: "table", shift_thz, gain, frequency_scaling}
//   attenuation { db_per_km: scalar | [...] }  (list is in ascending-frequency channel order)

namespace raman {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parsed but not yet assembled scenario; CLI overrides are applied here.
struct ScenarioConfig {
  double length_km = 100.0;
  double step_km = 0.1;
  std::vector<double> signal_frequency_thz;
  SignalPowerSpec signal_power = UniformPower{0.0};
  PumpSet pumps;
  double adjustment = 1.0;
  RamanGainModel gain_model = RamanGainModel::triangular();
  std::variant<double, std::vector<double>> attenuation_db_per_km = 0.2;

  LinkScenario build() const {
    LinkOptions opt;
    opt.length_km = length_km;
    opt.step_km = step_km;
    opt.gain_model = gain_model;
    if (const auto* scalar = std::get_if<double>(&attenuation_db_per_km)) opt.attenuation_db_per_km = *scalar;
    LinkScenario s;
    try {
      s = assemble_scenario(signal_frequency_thz, signal_power, pumps, adjustment, opt);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
    if (const auto* list = std::get_if<std::vector<double>>(&attenuation_db_per_km)) {
      if (list->size() != s.channels.size()) {
        throw ScenarioError("attenuation.db_per_km: list has " + std::to_string(list->size()) +
                            " entries, scenario has " + std::to_string(s.channels.size()) + " channels");
      }
      for (std::size_t i = 0; i < list->size(); ++i) s.channels[i].attenuation_per_km = db_per_km_to_linear((*list)[i]);
      try {
        s.validate();
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("attenuation.db_per_km: ") + e.what());
      }
    }
    return s;
  }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ScenarioError(path + ": missing required field '" + key + "'");
  return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path + ": expected a number");
  return v.get<double>();
}

inline std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ScenarioError(path + ": expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<double> parse_band(const json& b, const std::string& path) {
  const double start = number(require(b, "start_thz", path), path + ".start_thz");
  const json& cnt = require(b, "count", path);
  if (!cnt.is_number_integer() || cnt.get<long long>() <= 0) throw ScenarioError(path + ".count: expected a positive integer");
  const double spacing = number(require(b, "spacing_ghz", path), path + ".spacing_ghz");
  if (!(spacing > 0.0)) throw ScenarioError(path + ".spacing_ghz: must be positive");
  return band(start, static_cast<std::size_t>(cnt.get<long long>()), spacing);
}

inline SignalPowerSpec parse_signal_power(const json& v, const std::string& path) {
  if (v.is_number()) return UniformPower{v.get<double>()};
  if (v.is_array()) return PerChannelPower{number_list(v, path)};
  if (v.is_object()) {
    TiltPower t;
    t.mean_dbm = number(require(v, "mean_dbm", path), path + ".mean_dbm");
    t.tilt_db = number(require(v, "tilt_db", path), path + ".tilt_db");
    if (v.contains("k")) t.k = number(v.at("k"), path + ".k");
    return t;
  }
  throw ScenarioError(path + ": expected a number, a list, or {mean_dbm, tilt_db, k}");
}

inline RamanGainModel parse_raman(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "triangular") return RamanGainModel::triangular();
    throw ScenarioError("raman: unknown preset '" + v.get<std::string>() + "'");
  }
  if (!v.is_object()) throw ScenarioError("raman: expected a preset name or an object");
  std::string model = "triangular";
  if (v.contains("model")) {
    if (!v.at("model").is_string()) throw ScenarioError("raman.model: expected a string");
    model = v.at("model").get<std::string>();
  }
  bool scaling = true;
  if (v.contains("frequency_scaling")) {
    if (!v.at("frequency_scaling").is_boolean()) throw ScenarioError("raman.frequency_scaling: expected true or false");
    scaling = v.at("frequency_scaling").get<bool>();
  }
  try {
    if (model == "triangular") {
      const double peak = v.contains("peak_gain") ? number(v.at("peak_gain"), "raman.peak_gain") : 0.15;
      const double at = v.contains("peak_shift_thz") ? number(v.at("peak_shift_thz"), "raman.peak_shift_thz") : 13.2;
      const double cut = v.contains("cutoff_thz") ? number(v.at("cutoff_thz"), "raman.cutoff_thz") : 15.0;
      return RamanGainModel::triangular(peak, at, cut, scaling);
    }
    if (model == "table") {
      RamanGainModel m{number_list(require(v, "shift_thz", "raman"), "raman.shift_thz"),
                       number_list(require(v, "gain", "raman"), "raman.gain"), scaling};
      m.validate();
      return m;
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("raman: ") + e.what());
  }
  throw ScenarioError("raman.model: unknown model '" + model + "'");
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  using detail::number;
  using detail::number_list;
  using detail::require;
  if (!doc.is_object()) throw ScenarioError("scenario: top level must be an object");

  ScenarioConfig cfg;
  const auto& link = require(doc, "link", "scenario");
  cfg.length_km = number(require(link, "length_km", "link"), "link.length_km");
  cfg.step_km = number(require(link, "step_km", "link"), "link.step_km");
  if (!(cfg.length_km > 0.0)) throw ScenarioError("link.length_km: must be positive");
  if (!(cfg.step_km > 0.0) || cfg.step_km > cfg.length_km) throw ScenarioError("link.step_km: need 0 < step <= length");

  const auto& sig = require(doc, "signals", "scenario");
  if (sig.contains("frequency_thz")) {
    cfg.signal_frequency_thz = number_list(sig.at("frequency_thz"), "signals.frequency_thz");
  } else if (sig.contains("bands")) {
    const auto& bands = sig.at("bands");
    if (!bands.is_array() || bands.empty()) throw ScenarioError("signals.bands: expected a non-empty list");
    for (std::size_t i = 0; i < bands.size(); ++i) {
      const auto f = detail::parse_band(bands[i], "signals.bands[" + std::to_string(i) + "]");
      cfg.signal_frequency_thz.insert(cfg.signal_frequency_thz.end(), f.begin(), f.end());
    }
  } else if (sig.contains("start_thz")) {
    cfg.signal_frequency_thz = detail::parse_band(sig, "signals");
  } else {
    throw ScenarioError("signals: need frequency_thz, bands, or start_thz/count/spacing_ghz");
  }
  if (cfg.signal_frequency_thz.empty()) throw ScenarioError("signals: no channels");
  cfg.signal_power = detail::parse_signal_power(require(sig, "power_dbm", "signals"), "signals.power_dbm");

  if (doc.contains("pumps")) {
    const auto& p = doc.at("pumps");
    cfg.pumps.frequency_thz = number_list(require(p, "frequency_thz", "pumps"), "pumps.frequency_thz");
    cfg.pumps.power_mw = number_list(require(p, "power_mw", "pumps"), "pumps.power_mw");
    if (cfg.pumps.frequency_thz.size() != cfg.pumps.power_mw.size()) {
      throw ScenarioError("pumps: frequency_thz and power_mw differ in length");
    }
    if (p.contains("adjustment")) cfg.adjustment = number(p.at("adjustment"), "pumps.adjustment");
    if (!(cfg.adjustment > 0.0)) throw ScenarioError("pumps.adjustment: must be positive");
  }

  if (doc.contains("raman")) cfg.gain_model = detail::parse_raman(doc.at("raman"));

  if (doc.contains("attenuation")) {
    const auto& a = require(doc.at("attenuation"), "db_per_km", "attenuation");
    if (a.is_array()) {
      cfg.attenuation_db_per_km = number_list(a, "attenuation.db_per_km");
    } else {
      cfg.attenuation_db_per_km = number(a, "attenuation.db_per_km");
    }
  }
  return cfg;
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  return parse_scenario(doc);
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

}  // namespace raman
