// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "evcharge/controls/pll.hpp"
#include "evcharge/controls/vdcq.hpp"
#include "evcharge/sim/parameters.hpp"
#include "evcharge/testbeds/blocks.hpp"
#include "evcharge/testbeds/config.hpp"

namespace evcharge::testbeds {

struct ThreePhaseBus : DcSideBus {
  controls::Abc v_abc;
  controls::Abc i_abc;
  controls::Abc m_abc;
  double p = 0.0;  // filtered, W
  double q = 0.0;  // filtered, var
};

// Balanced source, phase a = V cos(w t).
struct GridSource {
  static constexpr const char* name = "source";
  double v_peak = 208.0 * std::numbers::sqrt2 / std::numbers::sqrt3;
  double w = 2.0 * std::numbers::pi * 60.0;

  void sense(ThreePhaseBus& bus, const StepClock& c) const {
    const controls::RotationTable r(w * c.t);
    bus.v_abc = {v_peak * r.cos0, v_peak * r.cos1, v_peak * r.cos2};
  }
};

// Active front end: PLL, P/Q measurement, V_DC/Q control with per-phase PR
// current loops, and the two-level converter on the grid impedance.
struct VscBlock {
  static constexpr const char* name = "vsc";
  circuits::GridParams params;
  circuits::GridStageState state;
  controls::Pll pll;
  controls::VdcQController ctl;
  controls::LowPass p_filter;
  controls::LowPass q_filter;
  double v_dc_ref = 350.0;
  double q_ref = 30e3;

  void sense(ThreePhaseBus& bus, const StepClock&) const {
    bus.v_dc = state.v_dc;
    bus.i_abc = {state.i.a, state.i.b, state.i.c};
  }

  void calculate(ThreePhaseBus& bus, const StepClock& c) {
    const auto lock = pll.step(bus.v_abc, c.step_size);
    const auto v = controls::abc_to_dq(bus.v_abc, lock.rotation);
    const auto i = controls::abc_to_dq(bus.i_abc, lock.rotation);
    const auto pq = controls::compute_pq(v.d, v.q, i.d, i.q);
    bus.p = p_filter.step(pq.p, c.step_size);
    bus.q = q_filter.step(pq.q, c.step_size);
    bus.m_abc = ctl.step(bus.v_dc, v_dc_ref, bus.q, q_ref, lock.rotation, bus.i_abc, c.step_size);
  }

  void integrate(ThreePhaseBus& bus, const StepClock& c) {
    circuits::ThreePhaseGates g;
    g.legs[0] = controls::pwm_leg(bus.m_abc.a, bus.phase, bus.span);
    g.legs[1] = controls::pwm_leg(bus.m_abc.b, bus.phase, bus.span);
    g.legs[2] = controls::pwm_leg(bus.m_abc.c, bus.phase, bus.span);
    state = circuits::vsc_step(state, g, {bus.v_abc.a, bus.v_abc.b, bus.v_abc.c}, bus.i_dab_in, params,
                               c.step_size);
  }

  [[nodiscard]] bool finite() const {
    return std::isfinite(state.i.a) && std::isfinite(state.i.b) && std::isfinite(state.i.c) &&
           std::isfinite(state.v_dc) && pll.finite() && ctl.finite() && std::isfinite(q_filter.y);
  }
};

using ThreePhaseGraph = sim::BlockGraph<ThreePhaseBus, CarrierClock, GridSource, VscBlock, DabBlock, BatteryBlock>;

// Level 3 charger: three-phase grid, VSC with V_DC/Q control, DC bus, DAB
// with CC/CV control, output filter, battery.
class ThreePhaseCharger {
 public:
  explicit ThreePhaseCharger(const TestbedConfig& cfg, double step_size = 20e-6) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.level != 3) throw std::invalid_argument("three-phase charger needs a level 3 config");
    auto& src = graph_.get<GridSource>();
    src.v_peak = cfg_.v_source_rms * std::numbers::sqrt2 / std::numbers::sqrt3;
    src.w = 2.0 * std::numbers::pi * cfg_.f_grid;
    graph_.get<CarrierClock>().f_pwm = cfg_.f_pwm;

    auto& vsc = graph_.get<VscBlock>();
    vsc.params = {cfg_.r_g, cfg_.l_g, cfg_.c_dc};
    vsc.state.v_dc = cfg_.v_dc_ref;
    vsc.v_dc_ref = cfg_.v_dc_ref;
    vsc.q_ref = cfg_.q_ref;
    vsc.pll.pi.gains = {cfg_.pll_kp, cfg_.pll_ki};
    vsc.pll.w_nominal = src.w;
    vsc.pll.w = src.w;
    controls::VdcQGains g;
    g.vdc = {cfg_.vdc_kp, cfg_.vdc_ki};
    g.q = {cfg_.q_kp, cfg_.q_ki};
    g.pr = {cfg_.pr_kp, cfg_.pr_kr, cfg_.pr_wc, cfg_.pr_w0};
    vsc.ctl.set_gains(g);
    vsc.p_filter.tau = cfg_.pq_tau;
    vsc.q_filter.tau = cfg_.pq_tau;

    init_dc_side(graph_, cfg_, step_size);

    params_.add("level3.vdc_ref", &vsc.v_dc_ref, 0.0, 800.0);
    params_.add("level3.q_ref", &vsc.q_ref, -100e3, 100e3);
    add_cccv_parameters(params_, graph_, 3);
  }

  ThreePhaseCharger(const ThreePhaseCharger&) = delete;
  ThreePhaseCharger& operator=(const ThreePhaseCharger&) = delete;

  void input(const StepClock& c) { graph_.input(c); }
  void calculate(const StepClock& c) { graph_.calculate(c); }
  void output(const StepClock& c) { graph_.output(c); }
  [[nodiscard]] std::optional<std::string_view> nonfinite_block() const { return graph_.nonfinite_block(); }
  [[nodiscard]] sim::ParameterTable& parameters() { return params_; }

  [[nodiscard]] static std::vector<std::string> signal_names() {
    return {"i_batt", "v_batt", "P_chg", "theta_shift", "v_dc", "Q", "soc"};
  }

  void sample(std::span<double> out) const {
    const auto& dab = graph_.get<DabBlock>();
    const auto& bat = graph_.get<BatteryBlock>();
    out[0] = dab.state.i_lout;
    out[1] = bat.state.v_terminal;
    out[2] = bat.state.v_terminal * dab.state.i_lout;
    out[3] = dab.state.phase_shift_cmd;
    out[4] = graph_.get<VscBlock>().state.v_dc;
    out[5] = graph_.bus.q;
    out[6] = bat.state.soc;
  }

  [[nodiscard]] const ThreePhaseBus& bus() const { return graph_.bus; }
  [[nodiscard]] const controls::CcCvController& cccv() const { return graph_.get<DabBlock>().cccv; }
  [[nodiscard]] const battery::BatteryState& battery_state() const { return graph_.get<BatteryBlock>().state; }
  [[nodiscard]] const circuits::DabStageState& dab_state() const { return graph_.get<DabBlock>().state; }
  [[nodiscard]] const circuits::GridStageState& grid_state() const { return graph_.get<VscBlock>().state; }
  [[nodiscard]] const VscBlock& vsc() const { return graph_.get<VscBlock>(); }
  [[nodiscard]] const TestbedConfig& config() const { return cfg_; }
  [[nodiscard]] ThreePhaseGraph& graph() { return graph_; }

 private:
  TestbedConfig cfg_;
  ThreePhaseGraph graph_;
  sim::ParameterTable params_;
};

}  // namespace evcharge::testbeds
