// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "evcharge/battery/battery.hpp"
#include "evcharge/circuits/stages.hpp"
#include "evcharge/controls/cccv.hpp"
#include "evcharge/controls/pwm.hpp"
#include "evcharge/sim/block_graph.hpp"
#include "evcharge/sim/parameters.hpp"
#include "evcharge/testbeds/config.hpp"

namespace evcharge::testbeds {

using sim::StepClock;

// Signals shared by every charger: the PWM carrier and the DC side from the
// bus capacitor to the battery. Level-specific buses extend it.
struct DcSideBus {
  double phase = 0.0;  // carrier phase at the start of the step, periods
  double span = 0.0;   // carrier periods covered by one step
  double v_dc = 0.0;
  double i_dab_in = 0.0;  // DAB draw on the DC bus from the last step
  double v_batt = 0.0;
  double i_batt = 0.0;
  double soc = 0.0;
  double theta = 0.0;  // phase-shift command, rad
};

// Shared 2 kHz triangle for every modulator. The phase is derived from the
// step index so it does not drift over long runs.
struct CarrierClock {
  static constexpr const char* name = "carrier";
  double f_pwm = 2000.0;

  template <class Bus>
  void sense(Bus& bus, const StepClock& c) const {
    bus.span = f_pwm * c.step_size;
    const double x = static_cast<double>(c.index) * bus.span;
    bus.phase = x - std::floor(x);
  }
};

// Mean over the last N samples (one carrier period), used to read the DAB
// terminal quantities without the switching ripple.
class CycleAverage {
 public:
  explicit CycleAverage(std::size_t n = 25) : buf_(std::max<std::size_t>(n, 1), 0.0) {}

  void reset(double v) {
    std::fill(buf_.begin(), buf_.end(), v);
    sum_ = v * static_cast<double>(buf_.size());
    pos_ = 0;
  }
  double push(double v) {
    sum_ += v - buf_[pos_];
    buf_[pos_] = v;
    pos_ = (pos_ + 1) % buf_.size();
    if (pos_ == 0) resum();
    return value();
  }
  [[nodiscard]] double value() const { return sum_ / static_cast<double>(buf_.size()); }

 private:
  void resum() {
    sum_ = 0.0;
    for (double x : buf_) sum_ += x;
  }
  std::vector<double> buf_;
  double sum_ = 0.0;
  std::size_t pos_ = 0;
};

// Dual active bridge with its output filter, driven by the CC/CV supervisor.
// The current loop regulates the secondary bridge current averaged over one
// carrier period; the voltage loop and the mode latch read the battery
// terminal voltage.
struct DabBlock {
  static constexpr const char* name = "dab";
  circuits::DabParams params;
  circuits::DabStageState state;
  controls::CcCvController cccv;
  CycleAverage i_meas;

  template <class Bus>
  void sense(Bus& bus, const StepClock&) {
    bus.i_batt = state.i_lout;
    i_meas.push(state.i_sec);
  }

  template <class Bus>
  void calculate(Bus& bus, const StepClock& c) {
    bus.theta = cccv.step(bus.v_batt, i_meas.value(), c.step_size, c.index);
    state.phase_shift_cmd = controls::CcCvController::degrees(bus.theta);
  }

  template <class Bus>
  void integrate(Bus& bus, const StepClock& c) {
    const auto [g1, g2] = controls::phase_shift_modulate(bus.theta / (std::numbers::pi / 2.0), bus.phase, bus.span);
    state = circuits::dab_step(state, g1, g2, bus.v_dc, bus.v_batt, params, c.step_size);
    bus.i_dab_in = state.i_in;
    bus.i_batt = state.i_lout;
  }

  [[nodiscard]] bool finite() const {
    return std::isfinite(state.i_lr) && std::isfinite(state.v_out) && std::isfinite(state.i_lout) && cccv.finite();
  }
};

struct BatteryBlock {
  static constexpr const char* name = "battery";
  battery::Battery model;
  battery::BatteryState state;

  template <class Bus>
  void sense(Bus& bus, const StepClock&) const {
    bus.v_batt = state.v_terminal;
    bus.soc = state.soc;
  }

  // Runs after the DAB, so bus.i_batt is the current just integrated. A
  // non-finite current is left for the engine's health check to report
  // against the stage that produced it.
  template <class Bus>
  void integrate(Bus& bus, const StepClock& c) {
    if (std::isfinite(bus.i_batt)) state = model.step(state, bus.i_batt, c.step_size);
  }

  [[nodiscard]] bool finite() const { return std::isfinite(state.it) && std::isfinite(state.v_terminal); }
};

// DAB, filter, CC/CV and battery setup common to every level.
template <class Graph>
void init_dc_side(Graph& g, const TestbedConfig& cfg, double step_size) {
  auto& dab = g.template get<DabBlock>();
  dab.params = {cfg.l_r, cfg.r_r, cfg.n, cfg.l_out, cfg.c_out};
  dab.cccv.i_cc = cfg.i_cc;
  dab.cccv.v_cv = cfg.v_cv;
  dab.cccv.cc_gains = {cfg.cccv_kp, cfg.cccv_ki};
  dab.cccv.cv_gains = {cfg.cv_kp, cfg.cv_ki};
  dab.cccv.pi.gains = dab.cccv.cc_gains;
  dab.cccv.slew = cfg.i_cc_slew > 0.0 ? cfg.i_cc_slew : cfg.i_cc;
  const auto n = static_cast<std::size_t>(std::max(1L, std::lround(1.0 / (cfg.f_pwm * step_size))));
  dab.i_meas = CycleAverage(n);

  auto& bat = g.template get<BatteryBlock>();
  battery::BatteryParams bp;
  bp.r_int = cfg.r_int;
  bat.model = battery::Battery(bp);
  bat.state = bat.model.initial(cfg.soc0);
  dab.state.v_out = bat.state.v_terminal;
  g.bus.v_batt = bat.state.v_terminal;
  g.bus.soc = bat.state.soc;
}

template <class Graph>
void add_cccv_parameters(sim::ParameterTable& t, Graph& g, int level) {
  auto& c = g.template get<DabBlock>().cccv;
  const std::string p = "level" + std::to_string(level);
  t.add(p + ".i_cc", &c.i_cc, 0.0, 200.0);
  t.add(p + ".v_cv", &c.v_cv, 0.0, 400.0);
}

}  // namespace evcharge::testbeds
