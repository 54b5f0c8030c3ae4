// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evcharge::battery {

struct BatteryParams {
  double capacity_q = 40.0;  // Ah
  double energy_kwh = 10.0;
  double v_full = 291.0;     // V
  double v_exp = 270.0;
  double v_nom = 250.0;
  double q_exp = 1.96;       // Ah
  double q_nom = 36.17;
  double r_int = 0.06;       // ohm
};

// Constants of the generic lithium-ion charge/discharge curve
//
//   E(it, i) = E0 - K Q/(Q - it) it + A exp(-B it) - pol(it, i) - R i
//
// with i the discharge-positive current, pol = K Q/(Q - it) i when
// discharging and K Q/(it + 0.1 Q) i when charging.
struct CurveConstants {
  double e0 = 0.0;     // V
  double a_amp = 0.0;  // V
  double b_inv = 0.0;  // 1/Ah
  double k_pol = 0.0;  // V
};

// A and B from the exponential zone; E0 and K so that the no-load curve goes
// through (0, V_full) and (Q_nom, V_nom).
[[nodiscard]] inline CurveConstants extract_curve_params(double v_full, double v_exp, double v_nom, double q_exp,
                                                         double q_nom, double capacity_q) {
  if (!(q_exp > 0.0 && q_exp < q_nom && q_nom < capacity_q))
    throw std::invalid_argument("battery: need 0 < Q_exp < Q_nom < Q");
  if (!(v_nom < v_exp && v_exp < v_full)) throw std::invalid_argument("battery: need V_nom < V_exp < V_full");
  CurveConstants c;
  c.a_amp = v_full - v_exp;
  c.b_inv = 3.0 / q_exp;
  c.e0 = v_full - c.a_amp;
  c.k_pol = (c.e0 + c.a_amp * std::exp(-c.b_inv * q_nom) - v_nom) * (capacity_q - q_nom) / (capacity_q * q_nom);
  if (!(c.k_pol > 0.0) || !std::isfinite(c.e0)) throw std::invalid_argument("battery: degenerate curve");
  return c;
}

[[nodiscard]] inline CurveConstants extract_curve_params(const BatteryParams& p) {
  return extract_curve_params(p.v_full, p.v_exp, p.v_nom, p.q_exp, p.q_nom, p.capacity_q);
}

// State of charge in percent; it outside [0, Q] is clamped and flagged.
[[nodiscard]] inline double soc(double it, double capacity_q, bool* saturated = nullptr) {
  const double c = std::clamp(it, 0.0, capacity_q);
  if (saturated) *saturated = c != it;
  return 100.0 * (1.0 - c / capacity_q);
}

struct BatteryState {
  double it = 0.0;          // Ah removed since full
  double soc = 100.0;       // %
  double v_terminal = 0.0;  // V
  double i = 0.0;           // A, charging positive
  bool saturated = false;
};

class Battery {
 public:
  Battery() : Battery(BatteryParams{}) {}
  explicit Battery(const BatteryParams& p) : params_(p), curve_(extract_curve_params(p)) {}

  [[nodiscard]] const BatteryParams& params() const { return params_; }
  [[nodiscard]] const CurveConstants& curve() const { return curve_; }
  void set_r_int(double r) { params_.r_int = r; }

  // Terminal voltage at extracted charge it for charging current i_chg.
  [[nodiscard]] double voltage(double it, double i_chg) const {
    const double q = params_.capacity_q;
    const double x = std::clamp(it, 0.0, q * (1.0 - 1e-9));
    const double i = -i_chg;
    const double pol = i > 0.0 ? curve_.k_pol * q / (q - x) * i : curve_.k_pol * q / (x + 0.1 * q) * i;
    return curve_.e0 - curve_.k_pol * q / (q - x) * x + curve_.a_amp * std::exp(-curve_.b_inv * x) - pol -
           params_.r_int * i;
  }

  [[nodiscard]] double open_circuit(double it) const { return voltage(it, 0.0); }

  [[nodiscard]] BatteryState initial(double soc_percent) const {
    BatteryState s;
    s.it = params_.capacity_q * (1.0 - soc_percent / 100.0);
    s.soc = soc(s.it, params_.capacity_q, &s.saturated);
    s.v_terminal = open_circuit(s.it);
    return s;
  }

  [[nodiscard]] BatteryState step(BatteryState s, double i_chg, double ts) const {
    if (!std::isfinite(i_chg)) throw std::invalid_argument("battery: non-finite current");
    s.i = i_chg;
    s.it -= i_chg * ts / 3600.0;
    s.soc = soc(s.it, params_.capacity_q, &s.saturated);
    if (s.saturated) s.it = std::clamp(s.it, 0.0, params_.capacity_q);
    s.v_terminal = voltage(s.it, i_chg);
    return s;
  }

 private:
  BatteryParams params_;
  CurveConstants curve_;
};

[[nodiscard]] inline BatteryState battery_step(const Battery& b, const BatteryState& s, double i_chg, double ts) {
  return b.step(s, i_chg, ts);
}

}  // namespace evcharge::battery
