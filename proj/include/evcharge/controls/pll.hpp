// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

#include "evcharge/controls/pi.hpp"
#include "evcharge/controls/transforms.hpp"

namespace evcharge::controls {

// Synchronous-reference-frame PLL: a PI drives v_q to zero by trimming the
// frequency around its nominal value; theta integrates the frequency.
struct Pll {
  PiController pi{PiGains{0.05, 1.0}};
  double w_nominal = 2.0 * std::numbers::pi * 60.0;
  double theta = 0.0;  // [0, 2 pi)
  double w = 2.0 * std::numbers::pi * 60.0;
  double v_q = 0.0;  // last measured

  // Angle at the sampling instant (before advancing) and its rotation table.
  struct Output {
    double theta;
    double w;
    RotationTable rotation;
  };

  Output step(const Abc& v, double ts) {
    const double now = theta;
    const RotationTable rot(now);
    v_q = abc_to_dq(v, rot).q;
    w = w_nominal + pi.step(v_q, ts);
    theta = wrap(now + w * ts);
    return {now, w, rot};
  }

  static double wrap(double x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x, two_pi);
    return x < 0.0 ? x + two_pi : x;
  }

  [[nodiscard]] bool finite() const { return std::isfinite(theta) && std::isfinite(w) && pi.finite(); }
};

}  // namespace evcharge::controls
