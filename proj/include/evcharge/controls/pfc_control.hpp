// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

#include "evcharge/controls/pi.hpp"

namespace evcharge::controls {

// Dual-loop PFC control. The outer PI turns the DC-bus error into an input
// conductance; multiplying it by the rectified voltage gives an inductor
// current reference in phase with that voltage. The inner PI corrects the
// boost duty around the feed-forward value 1 - v_rect / v_dc, which is the
// duty that holds the inductor current constant.
struct PfcController {
  PiController outer{PiGains{0.0005, 0.005}, 0.0, 1.0};  // output in siemens
  PiGains inner_gains{0.1, 0.1};
  PiController inner{PiGains{0.1, 0.1}};
  bool feedforward = true;
  double i_ref = 0.0;  // last reference, A
  double duty = 0.0;

  double step(double v_dc, double v_dc_ref, double v_rect, double i_l, double ts) {
    const double g = outer.step(v_dc_ref - v_dc, ts);
    i_ref = g * v_rect;
    const double ff = feedforward && v_dc > 0.0 ? std::clamp(1.0 - v_rect / v_dc, 0.0, 1.0) : 0.0;
    inner.gains = inner_gains;
    inner.lo = -ff;
    inner.hi = 1.0 - ff;
    duty = std::clamp(ff + inner.step(i_ref - i_l, ts), 0.0, 1.0);
    return duty;
  }

  [[nodiscard]] bool finite() const { return outer.finite() && inner.finite(); }
};

}  // namespace evcharge::controls
