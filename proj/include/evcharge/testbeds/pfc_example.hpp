// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evcharge/sim/parameters.hpp"
#include "evcharge/testbeds/single_phase.hpp"

namespace evcharge::testbeds {

// Fixed resistor across the DC bus.
struct ResistiveLoad {
  static constexpr const char* name = "load";
  double r = 200.0;  // ohm

  void sense(SinglePhaseBus& bus, const StepClock&) const { bus.i_dab_in = bus.v_dc / r; }
};

using PfcExampleGraph = sim::BlockGraph<SinglePhaseBus, CarrierClock, AcSource, PfcBlock, ResistiveLoad>;

// Stand-alone PFC boost on a resistive load, used for the output-voltage
// step test. The source amplitude must sit below the lowest reference in the
// test, so the example runs from a reduced supply.
class PfcExample {
 public:
  PfcExample(const TestbedConfig& cfg, double r_load) : cfg_(cfg) {
    cfg_.validate();
    if (!(r_load > 0.0)) throw std::invalid_argument("load resistance must be positive");
    auto& src = graph_.get<AcSource>();
    src.v_peak = cfg_.v_source_rms * std::numbers::sqrt2;
    src.w = 2.0 * std::numbers::pi * cfg_.f_grid;
    graph_.get<CarrierClock>().f_pwm = cfg_.f_pwm;
    graph_.get<ResistiveLoad>().r = r_load;

    auto& pfc = graph_.get<PfcBlock>();
    pfc.params = {cfg_.l_pfc, cfg_.c_dc};
    pfc.state.v_dc = cfg_.v_dc_ref;
    pfc.v_dc_ref = cfg_.v_dc_ref;
    pfc.enabled = cfg_.pfc_enabled;
    pfc.fixed_duty = cfg_.fixed_duty;
    pfc.ctl.outer.gains = {cfg_.pfc_outer_kp, cfg_.pfc_outer_ki};
    pfc.ctl.inner_gains = {cfg_.pfc_inner_kp, cfg_.pfc_inner_ki};
    // Start from the conductance that holds the initial bus voltage.
    const double v_rms = cfg_.v_source_rms;
    pfc.ctl.outer.integrator = cfg_.v_dc_ref * cfg_.v_dc_ref / r_load / (v_rms * v_rms);

    params_.add("pfc.vdc_ref", &pfc.v_dc_ref, 0.0, 600.0);
  }

  PfcExample(const PfcExample&) = delete;
  PfcExample& operator=(const PfcExample&) = delete;

  void input(const StepClock& c) { graph_.input(c); }
  void calculate(const StepClock& c) { graph_.calculate(c); }
  void output(const StepClock& c) { graph_.output(c); }
  [[nodiscard]] std::optional<std::string_view> nonfinite_block() const { return graph_.nonfinite_block(); }
  [[nodiscard]] sim::ParameterTable& parameters() { return params_; }

  [[nodiscard]] static std::vector<std::string> signal_names() { return {"v_dc", "i_L", "duty", "v_ac", "i_ac"}; }

  void sample(std::span<double> out) const {
    const auto& pfc = graph_.get<PfcBlock>();
    out[0] = pfc.state.v_dc;
    out[1] = pfc.state.i_l;
    out[2] = graph_.bus.duty;
    out[3] = graph_.bus.v_ac;
    out[4] = graph_.bus.v_ac >= 0.0 ? pfc.state.i_l : -pfc.state.i_l;
  }

  [[nodiscard]] const SinglePhaseBus& bus() const { return graph_.bus; }
  [[nodiscard]] const circuits::PfcStageState& pfc_state() const { return graph_.get<PfcBlock>().state; }
  [[nodiscard]] const TestbedConfig& config() const { return cfg_; }

 private:
  TestbedConfig cfg_;
  PfcExampleGraph graph_;
  sim::ParameterTable params_;
};

}  // namespace evcharge::testbeds
