// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "evcharge/controls/pi.hpp"

namespace evcharge::controls {

enum class ChargeMode { cc, cv };

inline const char* to_string(ChargeMode m) { return m == ChargeMode::cc ? "CC" : "CV"; }

// Constant-current / constant-voltage supervisor for the DAB. The phase
// shift always comes from the current loop; in CV an outer voltage loop on
// the battery terminal voltage lowers the current setpoint below I_CC. The
// CC -> CV switch is a one-way latch on the first sample with
// v_batt >= V_CV, and the outer integrator starts from the present setpoint
// so the handover is bumpless. The CC setpoint follows I_CC through a slew
// limit (soft start); slew = 0 disables it.
struct CcCvController {
  double i_cc = 5.0;   // A
  double v_cv = 262.0; // V
  double slew = 0.0;   // A/s
  double i_set = 0.0;  // current setpoint after slew / voltage loop
  PiGains cc_gains{0.01, 0.1};  // rad/A
  PiGains cv_gains{0.5, 5.0};   // A/V
  PiController pi{PiGains{0.01, 0.1}, 0.0, std::numbers::pi / 2.0};
  PiController vloop{PiGains{0.5, 5.0}, 0.0, 0.0};
  ChargeMode mode = ChargeMode::cc;
  int transitions = 0;
  std::int64_t transition_step = -1;

  // Returns the phase-shift command in radians, within [0, pi/2].
  double step(double v_batt, double i_fb, double ts, std::int64_t step_index = -1) {
    if (mode == ChargeMode::cc && v_batt >= v_cv) {
      mode = ChargeMode::cv;
      ++transitions;
      transition_step = step_index;
      vloop.gains = cv_gains;
      vloop.reset(i_set);
    }
    if (slew > 0.0) {
      const double d = slew * ts;
      i_set = std::clamp(i_cc, i_set - d, i_set + d);
    } else {
      i_set = i_cc;
    }
    if (mode == ChargeMode::cv) {
      vloop.lo = 0.0;
      vloop.hi = i_set;
      i_set = vloop.step(v_cv - v_batt, ts);
    }
    pi.gains = cc_gains;
    return pi.step(i_set - i_fb, ts);
  }

  [[nodiscard]] static double degrees(double radians) { return radians * 180.0 / std::numbers::pi; }
  [[nodiscard]] bool finite() const { return pi.finite() && vloop.finite(); }
};

}  // namespace evcharge::controls
