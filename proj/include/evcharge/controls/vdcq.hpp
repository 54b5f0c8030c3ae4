// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "evcharge/controls/pi.hpp"
#include "evcharge/controls/pr.hpp"
#include "evcharge/controls/transforms.hpp"

namespace evcharge::controls {

// First-order low-pass used on measured P and Q.
struct LowPass {
  double tau = 2e-3;  // s
  double y = 0.0;

  double step(double x, double ts) {
    y += (x - y) * std::min(1.0, ts / tau);
    return y;
  }
};

struct VdcQGains {
  PiGains vdc{0.1, 1.0};
  PiGains q{0.01, 0.1};
  PrGains pr{};
  double current_limit = 400.0;  // A, on i_d* and i_q*
};

// V_DC / Q control of the three-phase converter. i_d* comes from the DC-bus
// PI. Because Q = -1.5 v_d i_q, the Q loop takes its error as (Q - Q_ref)
// (the positive-feedback summing junction) to stay stabilising. Per-phase PR
// controllers turn the abc current error into converter voltage references,
// scaled by v_dc / 2 into modulation indices.
struct VdcQController {
  PiController vdc_pi;
  PiController q_pi;
  std::array<PrController, 3> pr{};
  Dq i_ref{};
  Abc i_ref_abc{};
  bool saturated = false;

  VdcQController() : VdcQController(VdcQGains{}) {}
  explicit VdcQController(const VdcQGains& g) { set_gains(g); }

  void set_gains(const VdcQGains& g) {
    vdc_pi = PiController{g.vdc, -g.current_limit, g.current_limit, vdc_pi.integrator};
    q_pi = PiController{g.q, -g.current_limit, g.current_limit, q_pi.integrator};
    for (auto& p : pr) p.gains = g.pr;
  }

  // Returns modulation indices in [-1, 1] for legs a, b, c.
  Abc step(double v_dc, double v_dc_ref, double q_meas, double q_ref, const RotationTable& rot, const Abc& i_abc,
           double ts) {
    i_ref.d = vdc_pi.step(v_dc_ref - v_dc, ts);
    i_ref.q = q_pi.step(q_meas - q_ref, ts);
    i_ref_abc = dq_to_abc(i_ref, rot);
    const double base = std::max(v_dc, 1.0) / 2.0;
    const double va = pr[0].step(i_abc.a - i_ref_abc.a, ts);
    const double vb = pr[1].step(i_abc.b - i_ref_abc.b, ts);
    const double vc = pr[2].step(i_abc.c - i_ref_abc.c, ts);
    Abc m{va / base, vb / base, vc / base};
    saturated = std::abs(m.a) > 1.0 || std::abs(m.b) > 1.0 || std::abs(m.c) > 1.0;
    m.a = std::clamp(m.a, -1.0, 1.0);
    m.b = std::clamp(m.b, -1.0, 1.0);
    m.c = std::clamp(m.c, -1.0, 1.0);
    return m;
  }

  [[nodiscard]] bool finite() const {
    return vdc_pi.finite() && q_pi.finite() && pr[0].finite() && pr[1].finite() && pr[2].finite();
  }
};

}  // namespace evcharge::controls
