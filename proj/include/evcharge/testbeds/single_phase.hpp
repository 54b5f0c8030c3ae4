// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "evcharge/controls/pfc_control.hpp"
#include "evcharge/sim/parameters.hpp"
#include "evcharge/testbeds/blocks.hpp"
#include "evcharge/testbeds/config.hpp"

namespace evcharge::testbeds {

struct SinglePhaseBus : DcSideBus {
  double v_ac = 0.0;
  double v_rect = 0.0;
  double i_l = 0.0;
  double duty = 0.0;
};

struct AcSource {
  static constexpr const char* name = "source";
  double v_peak = 120.0 * std::numbers::sqrt2;
  double w = 2.0 * std::numbers::pi * 60.0;

  void sense(SinglePhaseBus& bus, const StepClock& c) const {
    bus.v_ac = v_peak * std::sin(w * c.t);
    bus.v_rect = circuits::diode_bridge(bus.v_ac);
  }
};

// Boost PFC stage. With the controller disabled the duty is held at a fixed
// value, which is the uncontrolled comparison case.
struct PfcBlock {
  static constexpr const char* name = "pfc";
  circuits::BoostParams params;
  circuits::PfcStageState state;
  controls::PfcController ctl;
  double v_dc_ref = 300.0;
  bool enabled = true;
  double fixed_duty = 0.64;

  void sense(SinglePhaseBus& bus, const StepClock&) const {
    bus.v_dc = state.v_dc;
    bus.i_l = state.i_l;
  }

  void calculate(SinglePhaseBus& bus, const StepClock& c) {
    bus.duty = enabled ? ctl.step(bus.v_dc, v_dc_ref, bus.v_rect, bus.i_l, c.step_size) : fixed_duty;
  }

  void integrate(SinglePhaseBus& bus, const StepClock& c) {
    const auto gate = controls::pwm_leg(2.0 * bus.duty - 1.0, bus.phase, bus.span);
    state = circuits::boost_step(state, gate, bus.v_rect, bus.i_dab_in, params, c.step_size);
  }

  [[nodiscard]] bool finite() const { return std::isfinite(state.i_l) && std::isfinite(state.v_dc) && ctl.finite(); }
};

using SinglePhaseGraph = sim::BlockGraph<SinglePhaseBus, CarrierClock, AcSource, PfcBlock, DabBlock, BatteryBlock>;

// Level 1 / Level 2 charger: AC source, diode bridge, PFC boost, DC bus,
// DAB with CC/CV control, output filter, battery.
class SinglePhaseCharger {
 public:
  explicit SinglePhaseCharger(const TestbedConfig& cfg, double step_size = 20e-6) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.level == 3) throw std::invalid_argument("single-phase charger built with a level 3 config");
    auto& src = graph_.get<AcSource>();
    src.v_peak = cfg_.v_source_rms * std::numbers::sqrt2;
    src.w = 2.0 * std::numbers::pi * cfg_.f_grid;
    graph_.get<CarrierClock>().f_pwm = cfg_.f_pwm;

    auto& pfc = graph_.get<PfcBlock>();
    pfc.params = {cfg_.l_pfc, cfg_.c_dc};
    pfc.state.v_dc = cfg_.v_dc_ref;
    pfc.v_dc_ref = cfg_.v_dc_ref;
    pfc.enabled = cfg_.pfc_enabled;
    pfc.fixed_duty = cfg_.fixed_duty;
    pfc.ctl.outer.gains = {cfg_.pfc_outer_kp, cfg_.pfc_outer_ki};
    pfc.ctl.inner_gains = {cfg_.pfc_inner_kp, cfg_.pfc_inner_ki};

    init_dc_side(graph_, cfg_, step_size);

    params_.add("level" + std::to_string(cfg_.level) + ".vdc_ref", &pfc.v_dc_ref, 0.0, 600.0);
    add_cccv_parameters(params_, graph_, cfg_.level);
  }

  SinglePhaseCharger(const SinglePhaseCharger&) = delete;
  SinglePhaseCharger& operator=(const SinglePhaseCharger&) = delete;

  void input(const StepClock& c) { graph_.input(c); }
  void calculate(const StepClock& c) { graph_.calculate(c); }
  void output(const StepClock& c) { graph_.output(c); }
  [[nodiscard]] std::optional<std::string_view> nonfinite_block() const { return graph_.nonfinite_block(); }
  [[nodiscard]] sim::ParameterTable& parameters() { return params_; }

  [[nodiscard]] static std::vector<std::string> signal_names() {
    return {"i_batt", "v_batt", "P_chg", "theta_shift", "v_dc", "i_L", "soc"};
  }

  void sample(std::span<double> out) const {
    const auto& dab = graph_.get<DabBlock>();
    const auto& bat = graph_.get<BatteryBlock>();
    const auto& pfc = graph_.get<PfcBlock>();
    out[0] = dab.state.i_lout;
    out[1] = bat.state.v_terminal;
    out[2] = bat.state.v_terminal * dab.state.i_lout;
    out[3] = dab.state.phase_shift_cmd;
    out[4] = pfc.state.v_dc;
    out[5] = pfc.state.i_l;
    out[6] = bat.state.soc;
  }

  // Line current on the AC side of the diode bridge.
  [[nodiscard]] double i_ac() const {
    return graph_.bus.v_ac >= 0.0 ? graph_.get<PfcBlock>().state.i_l : -graph_.get<PfcBlock>().state.i_l;
  }
  [[nodiscard]] double v_ac() const { return graph_.bus.v_ac; }
  [[nodiscard]] const SinglePhaseBus& bus() const { return graph_.bus; }
  [[nodiscard]] const controls::CcCvController& cccv() const { return graph_.get<DabBlock>().cccv; }
  [[nodiscard]] const battery::BatteryState& battery_state() const { return graph_.get<BatteryBlock>().state; }
  [[nodiscard]] const circuits::DabStageState& dab_state() const { return graph_.get<DabBlock>().state; }
  [[nodiscard]] const circuits::PfcStageState& pfc_state() const { return graph_.get<PfcBlock>().state; }
  [[nodiscard]] const TestbedConfig& config() const { return cfg_; }
  [[nodiscard]] SinglePhaseGraph& graph() { return graph_; }

 private:
  TestbedConfig cfg_;
  SinglePhaseGraph graph_;
  sim::ParameterTable params_;
};

}  // namespace evcharge::testbeds
