// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

namespace evcharge::controls {

struct Abc {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct Dq {
  double d = 0.0;
  double q = 0.0;
};

// sin/cos of theta and of theta -/+ 120 degrees, shared by both transforms.
struct RotationTable {
  double cos0, cos1, cos2;
  double sin0, sin1, sin2;

  explicit RotationTable(double theta) {
    constexpr double half_sqrt3 = 0.86602540378443864676;
    cos0 = std::cos(theta);
    sin0 = std::sin(theta);
    // theta - 120: cos = -c/2 + s*sqrt3/2, sin = -s/2 - c*sqrt3/2
    cos1 = -0.5 * cos0 + half_sqrt3 * sin0;
    sin1 = -0.5 * sin0 - half_sqrt3 * cos0;
    // theta + 120
    cos2 = -0.5 * cos0 - half_sqrt3 * sin0;
    sin2 = -0.5 * sin0 + half_sqrt3 * cos0;
  }
};

// Amplitude-invariant Park transform. A balanced set
// x_a = X cos(phi), x_b = X cos(phi - 120), x_c = X cos(phi + 120)
// maps to d = X cos(phi - theta), q = X sin(phi - theta).
[[nodiscard]] inline Dq abc_to_dq(const Abc& x, const RotationTable& r) {
  constexpr double k = 2.0 / 3.0;
  return {k * (x.a * r.cos0 + x.b * r.cos1 + x.c * r.cos2), -k * (x.a * r.sin0 + x.b * r.sin1 + x.c * r.sin2)};
}

[[nodiscard]] inline Abc dq_to_abc(const Dq& x, const RotationTable& r) {
  return {x.d * r.cos0 - x.q * r.sin0, x.d * r.cos1 - x.q * r.sin1, x.d * r.cos2 - x.q * r.sin2};
}

[[nodiscard]] inline Dq abc_to_dq(double a, double b, double c, double theta) {
  return abc_to_dq(Abc{a, b, c}, RotationTable(theta));
}

[[nodiscard]] inline Abc dq_to_abc(double d, double q, double theta) {
  return dq_to_abc(Dq{d, q}, RotationTable(theta));
}

// Instantaneous real and reactive power absorbed from the grid.
struct PowerPq {
  double p = 0.0;
  double q = 0.0;
};

[[nodiscard]] inline PowerPq compute_pq(double v_d, double v_q, double i_d, double i_q) {
  return {1.5 * (v_d * i_d + v_q * i_q), 1.5 * (v_q * i_d - v_d * i_q)};
}

}  // namespace evcharge::controls
