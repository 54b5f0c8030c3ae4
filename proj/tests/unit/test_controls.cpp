#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "evcharge/controls/cccv.hpp"
#include "evcharge/controls/pfc_control.hpp"
#include "evcharge/controls/pi.hpp"
#include "evcharge/controls/pll.hpp"
#include "evcharge/controls/pr.hpp"
#include "evcharge/controls/transforms.hpp"
#include "evcharge/controls/vdcq.hpp"

using namespace evcharge::controls;
using Catch::Approx;

namespace {

constexpr double kTs = 20e-6;
constexpr double k120 = 2.0 * std::numbers::pi / 3.0;

Abc balanced(double x, double phi) { return {x * std::cos(phi), x * std::cos(phi - k120), x * std::cos(phi + k120)}; }

// Steady-state gain of a discrete controller driven by sin(w t), from the
// projection of the last `cycles` periods of the output onto sin and cos.
template <class Step>
double sine_gain(Step&& step, double w, double settle, int cycles) {
  const double period = 2.0 * std::numbers::pi / w;
  const auto n_settle = static_cast<long>(settle / kTs);
  const auto n_meas = static_cast<long>(std::round(cycles * period / kTs));
  double s = 0.0, c = 0.0;
  for (long k = 0; k < n_settle + n_meas; ++k) {
    const double t = static_cast<double>(k) * kTs;
    const double y = step(std::sin(w * t));
    if (k >= n_settle) {
      s += y * std::sin(w * t);
      c += y * std::cos(w * t);
    }
  }
  return 2.0 * std::hypot(s, c) / static_cast<double>(n_meas);
}

}  // namespace

TEST_CASE("PI: proportional plus forward-accumulated integral", "[controls][pi]") {
  PiController pi{{2.0, 10.0}};
  REQUIRE(pi.step(1.0, 0.1) == 2.0);
  REQUIRE(pi.step(1.0, 0.1) == Approx(3.0));
  REQUIRE(pi.peek(0.0) == Approx(2.0));
  pi.reset(0.5);
  REQUIRE(pi.step(0.0, 0.1) == 0.5);
}

TEST_CASE("PI: integrator freezes while pushing into a limit", "[controls][pi]") {
  PiController pi{{1.0, 100.0}, -1.0, 1.0};
  for (int k = 0; k < 1000; ++k) REQUIRE(pi.step(5.0, 0.01) <= 1.0);
  REQUIRE(pi.integrator < 1.0 + 1e-12);
  // Recovery is immediate once the error reverses.
  REQUIRE(pi.step(-0.5, 0.01) < 1.0);
}

TEST_CASE("PR: DC gain is kp", "[controls][pr]") {
  PrController pr{{200.0, 1000.0, 200.0, 377.0}};
  double u = 0.0;
  for (long k = 0; k < static_cast<long>(1.0 / kTs); ++k) u = pr.step(1.0, kTs);
  REQUIRE(u == Approx(200.0).epsilon(1e-3));
}

TEST_CASE("PR: gain at resonance is kp + kr", "[controls][pr]") {
  PrController pr{{200.0, 1000.0, 200.0, 377.0}};
  const double g = sine_gain([&](double e) { return pr.step(e, kTs); }, 377.0, 0.5, 10);
  REQUIRE(g == Approx(1200.0).epsilon(0.02));
}

TEST_CASE("PR: zero kr is a pure proportional gain", "[controls][pr]") {
  PrController pr{{3.0, 0.0, 200.0, 377.0}};
  const double g = sine_gain([&](double e) { return pr.step(e, kTs); }, 900.0, 0.1, 10);
  REQUIRE(g == Approx(3.0).epsilon(1e-3));
}

TEST_CASE("Park transform round trip and balanced mapping", "[controls][dq]") {
  for (double th : {0.0, 0.7, 2.9, 5.5}) {
    const RotationTable r(th);
    const Abc x{1.3, -0.4, -0.2};  // unbalanced parts vanish only for a zero-sum set
    const Abc z{x.a - (x.a + x.b + x.c) / 3, x.b - (x.a + x.b + x.c) / 3, x.c - (x.a + x.b + x.c) / 3};
    const Abc back = dq_to_abc(abc_to_dq(z, r), r);
    REQUIRE(back.a == Approx(z.a).margin(1e-12));
    REQUIRE(back.b == Approx(z.b).margin(1e-12));
    REQUIRE(back.c == Approx(z.c).margin(1e-12));

    const auto dq = abc_to_dq(balanced(170.0, th), r);
    REQUIRE(dq.d == Approx(170.0));
    REQUIRE(dq.q == Approx(0.0).margin(1e-9));
    const auto lead = abc_to_dq(balanced(170.0, th + 0.3), r);
    REQUIRE(lead.d == Approx(170.0 * std::cos(0.3)));
    REQUIRE(lead.q == Approx(170.0 * std::sin(0.3)));
  }
}

TEST_CASE("dq power matches phase-domain power", "[controls][dq]") {
  // p from the phase sums, q from the phasor form 1.5 V I sin(phi) for a
  // current lagging the voltage by phi.
  const double v = 170.0, i = 40.0, phi = 0.4, th = 1.1;
  const Abc va = balanced(v, th), ia = balanced(i, th - phi);
  const RotationTable r(th);
  const auto vd = abc_to_dq(va, r), id = abc_to_dq(ia, r);
  const auto pq = compute_pq(vd.d, vd.q, id.d, id.q);
  REQUIRE(pq.p == Approx(va.a * ia.a + va.b * ia.b + va.c * ia.c));
  REQUIRE(pq.q == Approx(1.5 * v * i * std::sin(phi)));
}

TEST_CASE("PLL locks onto a grid ten degrees ahead", "[controls][pll]") {
  Pll pll;
  const double peak = 208.0 * std::sqrt(2.0 / 3.0);
  const double off = 10.0 * std::numbers::pi / 180.0;
  for (long k = 0; k < static_cast<long>(1.5 / kTs); ++k) {
    const double t = static_cast<double>(k) * kTs;
    (void)pll.step(balanced(peak, 377.0 * t + off), kTs);
  }
  REQUIRE(std::abs(pll.v_q) < 0.01 * peak);
  REQUIRE(pll.w == Approx(2.0 * std::numbers::pi * 60.0).epsilon(1e-3));
}

TEST_CASE("CC/CV: soft start ramps the setpoint at the slew rate", "[controls][cccv]") {
  CcCvController c;
  c.i_cc = 10.0;
  c.slew = 5.0;
  for (int k = 0; k < 1000; ++k) (void)c.step(200.0, 0.0, 1e-3);
  REQUIRE(c.i_set == Approx(5.0));
}

TEST_CASE("CC/CV: latch is one way and bumpless", "[controls][cccv]") {
  CcCvController c;
  c.i_cc = 10.0;
  double last = 0.0;
  // Hold the current at its setpoint so the phase shift rests on the
  // integrator value.
  c.pi.reset(0.3);
  for (int k = 0; k < 100; ++k) last = c.step(250.0, 10.0, kTs, k);
  REQUIRE(c.mode == ChargeMode::cc);
  const double at = c.step(c.v_cv, 10.0, kTs, 100);
  REQUIRE(c.mode == ChargeMode::cv);
  REQUIRE(c.transition_step == 100);
  REQUIRE(at == Approx(last).margin(1e-12));
  for (int k = 0; k < 100; ++k) (void)c.step(k % 2 ? 240.0 : 270.0, 10.0, kTs, 101 + k);
  REQUIRE(c.transitions == 1);
  REQUIRE(c.mode == ChargeMode::cv);
}

TEST_CASE("CC/CV: overvoltage in CV lowers the current setpoint", "[controls][cccv]") {
  CcCvController c;
  c.i_cc = 30.0;
  (void)c.step(263.0, 30.0, kTs);
  REQUIRE(c.mode == ChargeMode::cv);
  for (int k = 0; k < 50000; ++k) (void)c.step(263.0, c.i_set, kTs);
  REQUIRE(c.i_set < 30.0 - 4.0);  // ki = 5 A/V s over 1 s at 1 V
  REQUIRE(c.i_set >= 0.0);
}

TEST_CASE("PFC: duty feed-forward is 1 - v_rect / v_dc", "[controls][pfc]") {
  PfcController p;
  p.outer.gains = {0.0, 0.0};
  p.inner_gains = {0.0, 0.0};
  REQUIRE(p.step(250.0, 250.0, 100.0, 0.0, kTs) == Approx(0.6));
  p.feedforward = false;
  REQUIRE(p.step(250.0, 250.0, 100.0, 0.0, kTs) == 0.0);
}

TEST_CASE("PFC: reference current follows the rectified voltage", "[controls][pfc]") {
  PfcController p;
  p.outer.reset(0.02);
  p.outer.gains = {0.0, 0.0};
  (void)p.step(300.0, 300.0, 150.0, 0.0, kTs);
  REQUIRE(p.i_ref == Approx(3.0));
  (void)p.step(300.0, 300.0, 0.0, 0.0, kTs);
  REQUIRE(p.i_ref == 0.0);
}

TEST_CASE("V_DC/Q: loop signs drive bus and reactive power toward reference", "[controls][vdcq]") {
  VdcQGains g;
  g.pr.kr = 0.0;
  VdcQController c(g);
  const RotationTable r(0.0);
  (void)c.step(340.0, 350.0, 5000.0, 0.0, r, {}, kTs);
  // Positive i_d draws power in and charges the bus.
  REQUIRE(c.i_ref.d > 0.0);
  REQUIRE(compute_pq(170.0, 0.0, c.i_ref.d, 0.0).p > 0.0);
  // Q above its reference must move Q down.
  REQUIRE(compute_pq(170.0, 0.0, 0.0, c.i_ref.q).q < 0.0);
}

TEST_CASE("V_DC/Q: current error is scaled by half the bus voltage", "[controls][vdcq]") {
  VdcQGains g;
  g.vdc = {0.0, 0.0};
  g.q = {0.0, 0.0};
  g.pr.kr = 0.0;
  VdcQController c(g);
  const auto m = c.step(800.0, 800.0, 0.0, 0.0, RotationTable(0.0), {1.0, 0.0, -1.0}, kTs);
  REQUIRE(m.a == Approx(0.5));
  REQUIRE(m.b == 0.0);
  REQUIRE(m.c == Approx(-0.5));
  REQUIRE_FALSE(c.saturated);
}

TEST_CASE("low-pass filter reaches 63 percent after one time constant", "[controls]") {
  LowPass f;
  double y = 0.0;
  for (int k = 0; k < 100; ++k) y = f.step(1.0, kTs);
  REQUIRE(y == Approx(1.0 - std::exp(-1.0)).epsilon(0.01));
}
