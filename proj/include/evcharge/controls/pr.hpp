// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace evcharge::controls {

struct PrGains {
  double kp = 200.0;
  double kr = 1000.0;
  double wc = 200.0;   // cutoff, rad/s
  double w0 = 377.0;   // resonance, rad/s
};

// Proportional-resonant controller
//
//   G(s) = kp + kr * 2 wc s / (s^2 + 2 wc s + w0^2)
//
// realised as two cascaded integrators in a feedback loop,
//
//   x1 = 1/s (2 wc e - 2 wc x1 - w0^2 x2),   x2 = 1/s x1,   u = kp e + kr x1,
//
// with each 1/s replaced by the forward discrete integrator Ts / (z - 1).
struct PrController {
  PrGains gains;
  double x1 = 0.0;
  double x2 = 0.0;

  double step(double error, double ts) {
    const double u = gains.kp * error + gains.kr * x1;
    const double dx1 = 2.0 * gains.wc * (error - x1) - gains.w0 * gains.w0 * x2;
    const double dx2 = x1;
    x1 += ts * dx1;
    x2 += ts * dx2;
    return u;
  }

  void reset() { x1 = x2 = 0.0; }
  [[nodiscard]] bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
};

}  // namespace evcharge::controls
