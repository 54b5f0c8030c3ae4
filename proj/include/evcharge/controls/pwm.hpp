// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <utility>

#include "evcharge/circuits/switching.hpp"

namespace evcharge::controls {

using circuits::HBridgeGates;
using circuits::Leg;
using circuits::PeriodicWindow;
using circuits::triangle;

// Sampled carrier comparison: the upper switch is on while the modulation is
// above the triangle. Modulation is clamped to [-1, 1].
[[nodiscard]] inline bool pwm_compare(double modulation, double carrier_phase) {
  const double m = std::clamp(modulation, -1.0, 1.0);
  if (m >= 1.0) return true;
  if (m <= -1.0) return false;
  return m > triangle(carrier_phase);
}

// The on-window of pwm_compare for a constant modulation, centred on the
// carrier trough.
[[nodiscard]] inline PeriodicWindow pwm_window(double modulation) {
  const double m = std::clamp(modulation, -1.0, 1.0);
  return PeriodicWindow{(3.0 - m) / 4.0, (1.0 + m) / 2.0};
}

// Exact on-fraction of a carrier-compared leg over the step that covers the
// carrier phases [phase_begin, phase_begin + phase_span).
[[nodiscard]] inline Leg pwm_leg(double modulation, double phase_begin, double phase_span) {
  return Leg(pwm_window(modulation).fraction(phase_begin, phase_span));
}

// DAB single phase-shift modulation. The primary bridge compares 0 with the
// carrier. The secondary compares v_c on the rising slope and -v_c on the
// falling slope, which keeps its duty at 50 % and delays it by v_c / 4 of a
// period, i.e. 90 degrees at v_c = 1.
struct PhaseShiftWindows {
  PeriodicWindow primary;
  PeriodicWindow secondary;
};

[[nodiscard]] inline PhaseShiftWindows phase_shift_windows(double v_c) {
  const double c = std::clamp(v_c, 0.0, 1.0);
  return {pwm_window(0.0), PeriodicWindow{0.75 + c / 4.0, 0.5}};
}

[[nodiscard]] inline std::pair<HBridgeGates, HBridgeGates> phase_shift_modulate(double v_c, double phase_begin,
                                                                                double phase_span) {
  const auto w = phase_shift_windows(v_c);
  HBridgeGates p;
  HBridgeGates s;
  p.legs[0] = Leg(w.primary.fraction(phase_begin, phase_span));
  s.legs[0] = Leg(w.secondary.fraction(phase_begin, phase_span));
  return {p, s};
}

// Point-sampled form of the same modulator.
[[nodiscard]] inline std::pair<bool, bool> phase_shift_gates(double v_c, double carrier_phase) {
  const double c = std::clamp(v_c, 0.0, 1.0);
  const double f = carrier_phase - std::floor(carrier_phase);
  const double carrier = triangle(f);
  const bool primary = 0.0 > carrier;
  const bool secondary = f < 0.5 ? c > carrier : -c > carrier;
  return {primary, secondary};
}

}  // namespace evcharge::controls
