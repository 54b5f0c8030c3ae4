// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evcharge/sim/recording.hpp"

namespace evcharge::design {

inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- sizing

// DC-bus capacitance for a peak-to-peak ripple dv at twice the line
// frequency f when the bus delivers i_out.
[[nodiscard]] inline double pfc_cap_size(double i_out, double f, double dv) {
  if (!(f > 0.0 && dv > 0.0) || i_out < 0.0) throw std::invalid_argument("pfc_cap_size: need I >= 0, f > 0, dV > 0");
  return i_out / (2.0 * kPi * f * dv);
}

struct BoostSizing {
  double duty = 0.0;
  double inductance = 0.0;  // H
};

[[nodiscard]] inline BoostSizing boost_inductor_size(double v_in, double v_out, double f_sw, double di) {
  if (!(v_in > 0.0)) throw std::invalid_argument("boost_inductor_size: V_in must be positive");
  if (v_in >= v_out) throw std::invalid_argument("boost_inductor_size: V_in must be below V_out");
  if (!(f_sw > 0.0 && di > 0.0)) throw std::invalid_argument("boost_inductor_size: f_sw and ripple must be positive");
  BoostSizing s;
  s.duty = (v_out - v_in) / v_out;
  s.inductance = (v_out - v_in) * s.duty / (f_sw * di);
  return s;
}

// ---------------------------------------------------------------- DAB

struct DabOperatingPoint {
  double v_in = 300.0;
  double v_out = 262.0;
  double r_load = 52.4;  // ohm, V_out / I_out at the operating point
  double w_sw = 2.0 * kPi * 2000.0;
  double l_r = 1e-3;
  double theta = 12.0 * kPi / 180.0;  // rad
};

// Fundamental-harmonic power transfer.
[[nodiscard]] inline double dab_power(const DabOperatingPoint& op) {
  const double k = 0.5 * (4.0 / kPi) * (4.0 / kPi);
  return k * op.v_in * op.v_out * std::sin(op.theta) / (op.w_sw * op.l_r);
}

// Small-signal gains of output voltage (K1) and output current (K2) to the
// phase shift.
[[nodiscard]] inline double dab_gain_k2(const DabOperatingPoint& op) {
  const double k = 0.5 * (4.0 / kPi) * (4.0 / kPi);
  return k * op.v_in * std::cos(op.theta) / (op.w_sw * op.l_r);
}

[[nodiscard]] inline double dab_gain_k1(const DabOperatingPoint& op) { return op.r_load * dab_gain_k2(op); }

// ---------------------------------------------------------------- responses

struct BodePoint {
  double w = 0.0;       // rad/s
  double mag_db = 0.0;
  double phase_deg = 0.0;
};

using FrequencyResponse = std::vector<BodePoint>;

// Log-spaced frequencies, per_decade points per decade, both ends included.
[[nodiscard]] inline std::vector<double> log_grid(double lo = 1.0, double hi = 1e5, int per_decade = 200) {
  const int n = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) w[static_cast<std::size_t>(k)] = lo * std::pow(10.0, static_cast<double>(k) / per_decade);
  return w;
}

template <class F>
[[nodiscard]] FrequencyResponse sample_response(F&& g, const std::vector<double>& grid) {
  FrequencyResponse r;
  r.reserve(grid.size());
  for (double w : grid) {
    const std::complex<double> h = g(std::complex<double>(0.0, w));
    r.push_back({w, 20.0 * std::log10(std::abs(h)), std::arg(h) * 180.0 / kPi});
  }
  return r;
}

// Unity feedback of a PI around the static plant K2:
//   T(s) = K2 (kp s + ki) / (s (1 + K2 kp) + K2 ki)
[[nodiscard]] inline FrequencyResponse dab_closed_loop(double kp, double ki, double k2,
                                                       const std::vector<double>& grid = log_grid()) {
  return sample_response(
      [&](std::complex<double> s) { return k2 * (kp * s + ki) / (s * (1.0 + k2 * kp) + k2 * ki); }, grid);
}

// Open loop L(s) = K2 (kp + ki / s).
[[nodiscard]] inline FrequencyResponse dab_open_loop(double kp, double ki, double k2,
                                                     const std::vector<double>& grid = log_grid()) {
  return sample_response([&](std::complex<double> s) { return k2 * (kp + ki / s); }, grid);
}

struct TimePoint {
  double t = 0.0;
  double y = 0.0;
};

// Unit-step response of the same loop, integrated at dt (forward Euler on
// the PI integrator state).
[[nodiscard]] inline std::vector<TimePoint> dab_step_response(double kp, double ki, double k2, double t_end = 10.0,
                                                              double dt = 1e-3) {
  std::vector<TimePoint> out;
  const auto n = static_cast<long>(std::lround(t_end / dt));
  out.reserve(static_cast<std::size_t>(n) + 1);
  double x = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double y = k2 * (kp + x) / (1.0 + k2 * kp);
    out.push_back({static_cast<double>(k) * dt, y});
    x += ki * (1.0 - y) * dt;
  }
  return out;
}

// First frequency where the magnitude falls below level_db, linearly
// interpolated in log-frequency. Returns 0 when it never does.
[[nodiscard]] inline double crossing_frequency(const FrequencyResponse& r, double level_db) {
  for (std::size_t k = 1; k < r.size(); ++k) {
    if (r[k - 1].mag_db >= level_db && r[k].mag_db < level_db) {
      const double f = (r[k - 1].mag_db - level_db) / (r[k - 1].mag_db - r[k].mag_db);
      return std::pow(10.0, std::log10(r[k - 1].w) + f * (std::log10(r[k].w) - std::log10(r[k - 1].w)));
    }
  }
  return 0.0;
}

[[nodiscard]] inline double bandwidth_3db(const FrequencyResponse& r) {
  return r.empty() ? 0.0 : crossing_frequency(r, r.front().mag_db - 3.0);
}

// 10-90 % rise time of a step response; negative when never reached.
[[nodiscard]] inline double rise_time(const std::vector<TimePoint>& y, double final_value = 1.0) {
  double t10 = -1.0;
  for (const auto& p : y) {
    if (t10 < 0.0 && p.y >= 0.1 * final_value) t10 = p.t;
    if (p.y >= 0.9 * final_value) return t10 < 0.0 ? -1.0 : p.t - t10;
  }
  return -1.0;
}

// ---------------------------------------------------------------- PR

[[nodiscard]] inline std::complex<double> pr_transfer(double kp, double kr, double wc, double w0, std::complex<double> s) {
  return kp + kr * 2.0 * wc * s / (s * s + 2.0 * wc * s + w0 * w0);
}

[[nodiscard]] inline FrequencyResponse pr_bode(double kp, double kr, double wc, double w0,
                                               const std::vector<double>& grid = log_grid()) {
  return sample_response([&](std::complex<double> s) { return pr_transfer(kp, kr, wc, w0, s); }, grid);
}

[[nodiscard]] inline std::size_t peak_index(const FrequencyResponse& r) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (r[k].mag_db > r[best].mag_db) best = k;
  return best;
}

// Width in rad/s of the contiguous band around the peak whose magnitude is
// at or above threshold_db; 0 when the peak itself is below it.
[[nodiscard]] inline double band_width(const FrequencyResponse& r, double threshold_db) {
  if (r.empty()) return 0.0;
  const std::size_t p = peak_index(r);
  if (r[p].mag_db < threshold_db) return 0.0;
  std::size_t lo = p;
  std::size_t hi = p;
  while (lo > 0 && r[lo - 1].mag_db >= threshold_db) --lo;
  while (hi + 1 < r.size() && r[hi + 1].mag_db >= threshold_db) ++hi;
  return r[hi].w - r[lo].w;
}

// ---------------------------------------------------------------- power quality

struct PowerQuality {
  double pf = 0.0;
  double thd = 0.0;          // current THD, ratio
  double displacement = 0.0; // cos of fundamental phase difference
  int cycles = 0;
};

// v and i sampled every dt. The analysis window is the last whole number of
// fundamental cycles available.
[[nodiscard]] inline PowerQuality power_factor(const std::vector<double>& v, const std::vector<double>& i, double dt,
                                               double f_fund) {
  if (v.size() != i.size()) throw std::invalid_argument("power_factor: sample vectors differ in length");
  const double period = 1.0 / f_fund;
  const int cycles = static_cast<int>(std::floor(static_cast<double>(v.size()) * dt / period + 1e-9));
  if (cycles < 1) throw std::invalid_argument("power_factor: window shorter than one fundamental cycle");
  const auto n = static_cast<std::size_t>(std::lround(cycles * period / dt));
  const std::size_t first = v.size() - n;
  double p = 0, vv = 0, ii = 0, vc = 0, vs = 0, ic = 0, is = 0;
  const double w = 2.0 * kPi * f_fund;
  for (std::size_t k = first; k < v.size(); ++k) {
    const double t = static_cast<double>(k - first) * dt;
    const double c = std::cos(w * t), s = std::sin(w * t);
    p += v[k] * i[k];
    vv += v[k] * v[k];
    ii += i[k] * i[k];
    vc += v[k] * c;
    vs += v[k] * s;
    ic += i[k] * c;
    is += i[k] * s;
  }
  const double nn = static_cast<double>(n);
  PowerQuality q;
  q.cycles = cycles;
  const double v_rms = std::sqrt(vv / nn), i_rms = std::sqrt(ii / nn);
  q.pf = v_rms > 0.0 && i_rms > 0.0 ? (p / nn) / (v_rms * i_rms) : 0.0;
  const double i1_rms = std::sqrt(2.0) * std::hypot(ic, is) / nn;
  q.thd = i1_rms > 0.0 ? std::sqrt(std::max(0.0, i_rms * i_rms - i1_rms * i1_rms)) / i1_rms : 0.0;
  q.displacement = std::cos(std::atan2(vs, vc) - std::atan2(is, ic));
  return q;
}

// ---------------------------------------------------------------- CSV

inline void write_csv(std::ostream& os, const FrequencyResponse& r) {
  std::string line;
  os << "w,mag_db,phase_deg\n";
  for (const auto& p : r) {
    line.clear();
    sim::append_number(line, p.w);
    line += ',';
    sim::append_number(line, p.mag_db);
    line += ',';
    sim::append_number(line, p.phase_deg);
    os << line << '\n';
  }
}

inline void write_csv(std::ostream& os, const std::vector<TimePoint>& y) {
  std::string line;
  os << "t,y\n";
  for (const auto& p : y) {
    line.clear();
    sim::append_number(line, p.t);
    line += ',';
    sim::append_number(line, p.y);
    os << line << '\n';
  }
}

}  // namespace evcharge::design
