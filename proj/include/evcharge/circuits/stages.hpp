// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "evcharge/circuits/switching.hpp"

namespace evcharge::circuits {

// Difference-equation models of each power stage. Unless noted otherwise the
// inductor currents are advanced first and the capacitor voltages then use
// the updated currents (semi-implicit Euler), which keeps a fixed undamped LC
// bounded.

[[nodiscard]] inline double diode_bridge(double v_ac) { return std::abs(v_ac); }

// ---------------------------------------------------------------- PFC boost

enum class Conduction { switch_on, diode_on, cutoff };

struct PfcStageState {
  double i_l = 0.0;   // A, boost inductor
  double v_dc = 0.0;  // V, DC-bus capacitor
  Conduction conduction = Conduction::cutoff;
};

struct BoostParams {
  double l1 = 10e-3;    // H
  double c_dc = 9.5e-3; // F
};

// gate.upper() is the switch on-fraction over the step. While off, the diode
// conducts as long as the inductor current is positive; the current never
// reverses (DCM clamp).
[[nodiscard]] inline PfcStageState boost_step(PfcStageState s, Leg gate, double v_rect, double i_load,
                                              const BoostParams& p, double ts) {
  const double d = gate.upper();
  const double off = 1.0 - d;
  const bool diode = s.i_l > 0.0 || v_rect > s.v_dc;
  const double v_l = diode ? v_rect - off * s.v_dc : d * v_rect;
  s.i_l = std::max(0.0, s.i_l + v_l / p.l1 * ts);
  const double i_diode = off * s.i_l;
  s.v_dc = std::max(0.0, s.v_dc + (i_diode - i_load) / p.c_dc * ts);
  s.conduction = d >= 1.0 ? Conduction::switch_on : (s.i_l > 0.0 ? Conduction::diode_on : Conduction::cutoff);
  return s;
}

// ---------------------------------------------------------------- DAB

struct DabParams {
  double l_r = 1e-3;      // H, series inductance (primary side)
  double r_r = 0.0;       // ohm, series resistance of the same branch
  double n = 1.0;         // turns ratio; the primary sees n * v2
  double l_out = 95e-3;   // H
  double c_out = 0.1e-3;  // F
};

// The secondary bridge feeds C_out; L_out carries the current from C_out to
// the battery terminals.
struct DabStageState {
  double i_lr = 0.0;    // A, series inductor
  double v_out = 0.0;   // V, C_out
  double i_lout = 0.0;  // A, L_out = battery current
  double phase_shift_cmd = 0.0;  // degrees
  double v1 = 0.0;      // V, primary bridge voltage (step average)
  double v2 = 0.0;      // V, secondary bridge voltage
  double i_in = 0.0;    // A, drawn from the DC bus
  double i_sec = 0.0;   // A, secondary bridge output into C_out
};

// Trapezoidal (implicit midpoint) update of the three coupled states. The
// bridges flip the sign of the L_r / C_out coupling every half period; an
// explicit update of that pair gains energy at each flip and diverges within
// a fraction of a second, while the trapezoidal map conserves the stored
// energy of the lossless network for any gate sequence. The midpoint is
// solved in closed form. Terminal currents are the step averages.
[[nodiscard]] inline DabStageState dab_step(DabStageState s, const HBridgeGates& primary,
                                            const HBridgeGates& secondary, double v_dc_in, double v_batt,
                                            const DabParams& p, double ts) {
  const double a = primary.legs[0].polarity();
  const double b = p.n * secondary.legs[0].polarity();
  const double al = 0.5 * ts / p.l_r;
  const double ga = 0.5 * ts / p.c_out;
  const double be = 0.5 * ts / p.l_out;
  const double rho = 1.0 / (1.0 + al * p.r_r);
  const double mv = (s.v_out + ga * b * rho * (s.i_lr + al * a * v_dc_in) - ga * (s.i_lout - be * v_batt)) /
                    (1.0 + ga * rho * al * b * b + ga * be);
  const double mi = rho * (s.i_lr + al * (a * v_dc_in - b * mv));
  const double mj = s.i_lout + be * (mv - v_batt);
  s.i_lr = 2.0 * mi - s.i_lr;
  s.v_out = 2.0 * mv - s.v_out;
  s.i_lout = 2.0 * mj - s.i_lout;
  s.v1 = a * v_dc_in;
  s.v2 = secondary.legs[0].polarity() * mv;
  s.i_in = a * mi;
  s.i_sec = b * mi;
  return s;
}

// ---------------------------------------------------------------- LC filter

struct LcState {
  double i_l = 0.0;  // A
  double v_c = 0.0;  // V
};

// Series L from v_in into a shunt C; the load draws i_load from the
// capacitor node.
[[nodiscard]] inline LcState lc_filter_step(LcState s, double v_in, double i_load, double l, double c, double ts) {
  s.i_l += (v_in - s.v_c) / l * ts;
  s.v_c += (s.i_l - i_load) / c * ts;
  return s;
}

// ---------------------------------------------------------------- VSC

struct Abc3 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct GridParams {
  double r_g = 3e-3;    // ohm
  double l_g = 3e-3;    // H
  double c_dc = 30e-3;  // F
};

// Phase currents flow from the grid into the converter.
struct GridStageState {
  Abc3 i;
  double v_dc = 0.0;
  Abc3 v_conv;         // phase-to-neutral converter voltage
  double i_dc_in = 0.0;  // A, rectified into the bus
};

// Core update with explicit converter phase voltages; i_dc_in is supplied by
// the caller since it depends on how v_conv was produced.
[[nodiscard]] inline GridStageState vsc_voltage_step(GridStageState s, const Abc3& v_conv, const Abc3& v_grid,
                                                     const GridParams& p, double ts) {
  s.v_conv = v_conv;
  s.i.a += (v_grid.a - v_conv.a - p.r_g * s.i.a) / p.l_g * ts;
  s.i.b += (v_grid.b - v_conv.b - p.r_g * s.i.b) / p.l_g * ts;
  s.i.c += (v_grid.c - v_conv.c - p.r_g * s.i.c) / p.l_g * ts;
  return s;
}

// Two-level bridge, ungrounded star: each pole sits at +/- v_dc / 2 and the
// common-mode part cancels in the phase voltages.
[[nodiscard]] inline GridStageState vsc_step(GridStageState s, const ThreePhaseGates& gates, const Abc3& v_grid,
                                             double i_dc_load, const GridParams& p, double ts) {
  const double half = 0.5 * s.v_dc;
  const double pa = gates.legs[0].polarity() * half;
  const double pb = gates.legs[1].polarity() * half;
  const double pc = gates.legs[2].polarity() * half;
  const double cm = (pa + pb + pc) / 3.0;
  s = vsc_voltage_step(s, Abc3{pa - cm, pb - cm, pc - cm}, v_grid, p, ts);
  s.i_dc_in = gates.legs[0].upper() * s.i.a + gates.legs[1].upper() * s.i.b + gates.legs[2].upper() * s.i.c;
  s.v_dc += (s.i_dc_in - i_dc_load) / p.c_dc * ts;
  return s;
}

}  // namespace evcharge::circuits
