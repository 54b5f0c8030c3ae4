// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace evcharge::controls {

struct PiGains {
  double kp = 0.0;
  double ki = 0.0;
};

// Discrete PI with forward-accumulating integrator and clamping
// anti-windup: the integrator is frozen while the output sits on a limit and
// the error would push it further out.
struct PiController {
  PiGains gains;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double integrator = 0.0;

  double step(double error, double ts) {
    const double raw = gains.kp * error + integrator;
    const double u = std::clamp(raw, lo, hi);
    const bool pushing_high = raw >= hi && error > 0.0;
    const bool pushing_low = raw <= lo && error < 0.0;
    if (!pushing_high && !pushing_low) integrator += gains.ki * error * ts;
    return u;
  }

  // Output without advancing the integrator.
  [[nodiscard]] double peek(double error) const { return std::clamp(gains.kp * error + integrator, lo, hi); }

  void reset(double value = 0.0) { integrator = value; }
  [[nodiscard]] bool finite() const { return std::isfinite(integrator); }
};

}  // namespace evcharge::controls
