#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "raman/units.hpp"

namespace raman {

using CouplingMatrix = Eigen::MatrixXd;

enum class Direction { Forward, Backward };
enum class BoundaryEnd { Start, End };

inline double direction_sign(Direction d) { return d == Direction::Forward ? 1.0 : -1.0; }

// One signal or pump. Forward channels are launched at z=0, backward pumps at z=L.
struct ChannelSpec {
  double center_frequency_thz = 0.0;
  Direction direction = Direction::Forward;
  double attenuation_per_km = 0.0;  // linear, 1/km
  double boundary_power_w = 0.0;
  BoundaryEnd boundary_end = BoundaryEnd::Start;

  static ChannelSpec signal(double f_thz, double power_w, double alpha) {
    return {f_thz, Direction::Forward, alpha, power_w, BoundaryEnd::Start};
  }
  static ChannelSpec backward_pump(double f_thz, double power_w, double alpha) {
    return {f_thz, Direction::Backward, alpha, power_w, BoundaryEnd::End};
  }

  void validate() const {
    if (!(center_frequency_thz > 0.0)) throw std::invalid_argument("channel frequency must be positive");
    if (!(attenuation_per_km >= 0.0)) throw std::invalid_argument("channel attenuation must be non-negative");
    if (!(boundary_power_w > 0.0)) throw std::invalid_argument("channel boundary power must be positive");
    const bool consistent = (direction == Direction::Forward) == (boundary_end == BoundaryEnd::Start);
    if (!consistent) throw std::invalid_argument("forward channels are bound at z=0, backward channels at z=L");
  }
};

/// Normalized Raman gain spectrum g_R(shift), sampled on a piecewise-linear table.
///
/// Gain is zero at zero shift and beyond the last tabulated shift. With
/// `frequency_scaling` on, the depleted (higher-frequency) channel loses
/// f_i/f_j times the gain its partner receives.
struct RamanGainModel {
  std::vector<double> shift_grid_thz{0.0};
  std::vector<double> gain_values{0.0};  // 1/(W km)
  bool frequency_scaling = true;

  static RamanGainModel triangular(double peak_gain = 0.15, double peak_shift_thz = 13.2,
                                   double cutoff_thz = 15.0, bool scaling = true) {
    if (!(peak_shift_thz > 0.0 && cutoff_thz > peak_shift_thz)) {
      throw std::invalid_argument("triangular gain: need 0 < peak shift < cutoff");
    }
    RamanGainModel m{{0.0, peak_shift_thz, cutoff_thz}, {0.0, peak_gain, 0.0}, scaling};
    m.validate();
    return m;
  }

  static RamanGainModel zero() { return RamanGainModel{{0.0}, {0.0}, true}; }

  void validate() const {
    if (shift_grid_thz.empty() || shift_grid_thz.size() != gain_values.size()) {
      throw std::invalid_argument("gain model: shift and gain tables must be non-empty and equal length");
    }
    if (shift_grid_thz.front() != 0.0 || gain_values.front() != 0.0) {
      throw std::invalid_argument("gain model: table must start at shift 0 with gain 0");
    }
    for (std::size_t i = 1; i < shift_grid_thz.size(); ++i) {
      if (!(shift_grid_thz[i] > shift_grid_thz[i - 1])) {
        throw std::invalid_argument("gain model: shifts must be strictly ascending");
      }
    }
    for (double g : gain_values) {
      if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("gain model: gains must be finite and >= 0");
    }
  }

  // Linear interpolation inside the table, zero outside.
  double gain(double shift_thz) const {
    const double s = std::abs(shift_thz);
    if (s >= shift_grid_thz.back()) return 0.0;
    auto hi = std::upper_bound(shift_grid_thz.begin(), shift_grid_thz.end(), s);
    const auto k = static_cast<std::size_t>(hi - shift_grid_thz.begin());
    const double x0 = shift_grid_thz[k - 1], x1 = shift_grid_thz[k];
    const double t = (s - x0) / (x1 - x0);
    return gain_values[k - 1] + t * (gain_values[k] - gain_values[k - 1]);
  }
};

// Sample points along the span: [0, dz, 2dz, ..., L]. The last interval is
// shortened when L is not a multiple of dz.
struct Grid {
  std::vector<double> points;
  double step = 0.0;
  std::size_t n_steps = 0;

  std::size_t size() const { return points.size(); }
  double length() const { return points.back(); }
  // Interval k spans [points[k], points[k+1]].
  double interval(std::size_t k) const { return points[k + 1] - points[k]; }
};

inline Grid build_grid(double length_km, double step_km) {
  if (!(length_km > 0.0) || !(step_km > 0.0) || !std::isfinite(length_km) || !std::isfinite(step_km)) {
    throw std::invalid_argument("build_grid: length and step must be positive");
  }
  if (step_km > length_km) throw std::invalid_argument("build_grid: step exceeds length");
  // Guard ceil() against representation noise, e.g. 100/0.1 = 1000.0000000000001.
  const double ratio = length_km / step_km;
  const double nearest = std::round(ratio);
  const auto n = static_cast<std::size_t>(
      std::abs(ratio - nearest) <= 1e-9 * nearest ? nearest : std::ceil(ratio));
  Grid g;
  g.step = step_km;
  g.n_steps = n;
  g.points.resize(n + 1);
  for (std::size_t k = 0; k < n; ++k) g.points[k] = static_cast<double>(k) * step_km;
  g.points[n] = length_km;
  return g;
}

struct LinkScenario {
  std::vector<ChannelSpec> channels;
  double length_km = 100.0;
  double step_km = 0.1;
  RamanGainModel gain_model = RamanGainModel::triangular();

  std::size_t channel_count() const { return channels.size(); }

  std::size_t pump_count() const {
    return static_cast<std::size_t>(std::count_if(channels.begin(), channels.end(),
        [](const ChannelSpec& c) { return c.direction == Direction::Backward; }));
  }
  std::size_t signal_count() const { return channel_count() - pump_count(); }

  // Index of the first backward channel (== channel_count() when there are none).
  std::size_t pump_begin() const {
    auto it = std::find_if(channels.begin(), channels.end(),
        [](const ChannelSpec& c) { return c.direction == Direction::Backward; });
    return static_cast<std::size_t>(it - channels.begin());
  }

  std::vector<std::size_t> pump_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < channels.size(); ++i) {
      if (channels[i].direction == Direction::Backward) idx.push_back(i);
    }
    return idx;
  }

  void validate() const {
    if (channels.empty()) throw std::invalid_argument("scenario: no channels");
    for (const auto& c : channels) c.validate();
    for (std::size_t i = 1; i < channels.size(); ++i) {
      if (!(channels[i].center_frequency_thz > channels[i - 1].center_frequency_thz)) {
        throw std::invalid_argument("scenario: channels must be strictly ascending in frequency");
      }
    }
    if (signal_count() == 0) throw std::invalid_argument("scenario: at least one signal channel required");
    // Each direction occupies one contiguous block.
    std::size_t switches = 0;
    for (std::size_t i = 1; i < channels.size(); ++i) {
      if (channels[i].direction != channels[i - 1].direction) ++switches;
    }
    if (switches > 1) throw std::invalid_argument("scenario: signal and pump channels must form contiguous blocks");
    if (!(length_km > 0.0) || !(step_km > 0.0) || step_km > length_km) {
      throw std::invalid_argument("scenario: need 0 < step <= length");
    }
    gain_model.validate();
  }

  Eigen::VectorXd attenuation() const {
    Eigen::VectorXd a(static_cast<Eigen::Index>(channels.size()));
    for (std::size_t i = 0; i < channels.size(); ++i) a[static_cast<Eigen::Index>(i)] = channels[i].attenuation_per_km;
    return a;
  }

  Eigen::VectorXd direction() const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(channels.size()));
    for (std::size_t i = 0; i < channels.size(); ++i) d[static_cast<Eigen::Index>(i)] = direction_sign(channels[i].direction);
    return d;
  }

  Eigen::VectorXd boundary_powers() const {
    Eigen::VectorXd b(static_cast<Eigen::Index>(channels.size()));
    for (std::size_t i = 0; i < channels.size(); ++i) b[static_cast<Eigen::Index>(i)] = channels[i].boundary_power_w;
    return b;
  }
};

// G[i][j] > 0 when channel i is pumped by the higher-frequency channel j,
// G[i][j] < 0 when channel i feeds the lower-frequency channel j.
inline CouplingMatrix build_coupling_matrix(const LinkScenario& scenario) {
  scenario.validate();
  const auto n = static_cast<Eigen::Index>(scenario.channels.size());
  CouplingMatrix g = CouplingMatrix::Zero(n, n);
  const auto& model = scenario.gain_model;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fi = scenario.channels[static_cast<std::size_t>(i)].center_frequency_thz;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double fj = scenario.channels[static_cast<std::size_t>(j)].center_frequency_thz;
      const double gr = model.gain(fj - fi);
      if (fj > fi) {
        g(i, j) = gr;
      } else {
        g(i, j) = model.frequency_scaling ? -(fi / fj) * gr : -gr;
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Scenario builders

struct UniformPower {
  double dbm = 0.0;
};

struct PerChannelPower {
  std::vector<double> dbm;
};

// Linear tilt in dB across the signal comb: the lowest channel sits at
// mean - k*tilt/2, the highest at mean + k*tilt/2.
struct TiltPower {
  double mean_dbm = 0.0;
  double tilt_db = 0.0;
  double k = 1.0;
};

using SignalPowerSpec = std::variant<UniformPower, PerChannelPower, TiltPower>;

inline std::vector<double> signal_powers_dbm(const SignalPowerSpec& spec, const std::vector<double>& freqs_thz) {
  const std::size_t n = freqs_thz.size();
  std::vector<double> out(n);
  if (const auto* u = std::get_if<UniformPower>(&spec)) {
    std::fill(out.begin(), out.end(), u->dbm);
  } else if (const auto* p = std::get_if<PerChannelPower>(&spec)) {
    if (p->dbm.size() != n) {
      throw std::invalid_argument("per-channel signal power list has " + std::to_string(p->dbm.size()) +
                                  " entries, expected " + std::to_string(n));
    }
    out = p->dbm;
  } else {
    const auto& t = std::get<TiltPower>(spec);
    const auto [lo, hi] = std::minmax_element(freqs_thz.begin(), freqs_thz.end());
    const double span = *hi - *lo;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = span > 0.0 ? (freqs_thz[i] - *lo) / span - 0.5 : 0.0;
      out[i] = t.mean_dbm + t.k * t.tilt_db * x;
    }
  }
  return out;
}

// Evenly spaced comb of `count` channels starting at `start_thz`.
inline std::vector<double> band(double start_thz, std::size_t count, double spacing_ghz) {
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) f[i] = start_thz + static_cast<double>(i) * spacing_ghz * 1e-3;
  return f;
}

struct LinkOptions {
  double length_km = 100.0;
  double step_km = 0.1;
  double attenuation_db_per_km = 0.2;
  RamanGainModel gain_model = RamanGainModel::triangular();
};

struct PumpSet {
  std::vector<double> frequency_thz;
  std::vector<double> power_mw;
};

// Reference pump set for C+L and its 5 THz up-shifted S-band variant.
inline PumpSet cl_pumps() {
  return {{210.56, 208.87, 206.72, 204.51, 200.55}, {360.0, 320.0, 200.0, 130.0, 180.0}};
}

inline PumpSet cls_pumps() {
  return {{215.56, 213.87, 211.72, 209.51, 205.55}, {360.0, 320.0, 200.0, 130.0, 180.0}};
}

// Assemble a frequency-sorted scenario from signal frequencies and a pump set.
inline LinkScenario assemble_scenario(const std::vector<double>& signal_freqs, const SignalPowerSpec& power,
                                      const PumpSet& pumps, double adjustment, const LinkOptions& opt) {
  if (!(adjustment > 0.0)) throw std::invalid_argument("pump adjustment factor must be positive");
  if (pumps.frequency_thz.size() != pumps.power_mw.size()) {
    throw std::invalid_argument("pump frequency and power lists differ in length");
  }
  const double alpha = db_per_km_to_linear(opt.attenuation_db_per_km);
  const auto dbm = signal_powers_dbm(power, signal_freqs);

  LinkScenario s;
  s.length_km = opt.length_km;
  s.step_km = opt.step_km;
  s.gain_model = opt.gain_model;
  for (std::size_t i = 0; i < signal_freqs.size(); ++i) {
    s.channels.push_back(ChannelSpec::signal(signal_freqs[i], dbm_to_watt(dbm[i]), alpha));
  }
  for (std::size_t i = 0; i < pumps.frequency_thz.size(); ++i) {
    s.channels.push_back(ChannelSpec::backward_pump(pumps.frequency_thz[i], pumps.power_mw[i] * 1e-3 / adjustment, alpha));
  }
  std::stable_sort(s.channels.begin(), s.channels.end(), [](const ChannelSpec& a, const ChannelSpec& b) {
    return a.center_frequency_thz < b.center_frequency_thz;
  });
  s.validate();
  return s;
}

inline std::vector<double> cl_signal_frequencies() {
  // L band then C band, one contiguous 125 GHz comb from 186 THz.
  return band(186.0, 76, 125.0);
}

inline std::vector<double> cls_signal_frequencies() {
  auto f = cl_signal_frequencies();
  const auto s = band(196.0, 38, 125.0);
  f.insert(f.end(), s.begin(), s.end());
  return f;
}

inline LinkScenario make_cl_scenario(const SignalPowerSpec& power, double adjustment, const LinkOptions& opt = {}) {
  return assemble_scenario(cl_signal_frequencies(), power, cl_pumps(), adjustment, opt);
}

inline LinkScenario make_cl_scenario(double signal_dbm, double adjustment, const LinkOptions& opt = {}) {
  return make_cl_scenario(UniformPower{signal_dbm}, adjustment, opt);
}

// C+L+S. For a TiltPower spec, `tilt_k` replaces its k.
inline LinkScenario make_cls_scenario(SignalPowerSpec power, double adjustment, double tilt_k,
                                      const LinkOptions& opt = {}) {
  if (auto* t = std::get_if<TiltPower>(&power)) t->k = tilt_k;
  return assemble_scenario(cls_signal_frequencies(), power, cls_pumps(), adjustment, opt);
}

}  // namespace raman
