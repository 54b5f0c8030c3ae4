// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "evcharge/sim/types.hpp"
#include "evcharge/testbeds/config.hpp"

namespace evcharge::testbeds {

enum class ModelKind { charger, pfc_example };

struct Scenario {
  std::string name;
  ModelKind kind = ModelKind::charger;
  TestbedConfig config;
  double duration = 0.0;  // s
  double r_load = 0.0;    // ohm, pfc_example only
  std::vector<sim::ScheduledCommand> commands;

  void validate() const {
    config.validate();
    if (!(duration >= 0.0)) throw std::invalid_argument("scenario duration must be non-negative");
    for (const auto& c : commands)
      if (c.time < 0.0 || c.time > duration)
        throw std::invalid_argument("command " + c.target + " scheduled outside the scenario duration");
    if (kind == ModelKind::pfc_example && !(r_load > 0.0))
      throw std::invalid_argument("pfc example needs a positive load resistance");
  }
};

// 25-minute charge from 10 % SOC with the level presets.
[[nodiscard]] inline Scenario default_scenario(int level) {
  Scenario s;
  s.name = "charge";
  s.config = level_defaults(level);
  s.duration = 1500.0;
  return s;
}

[[nodiscard]] inline std::vector<std::string> step_test_names() {
  return {"pfc_step", "vdcq_step", "no_pfc_comparison"};
}

// Level a named step test belongs to; the PFC example is a level 1 subsystem.
[[nodiscard]] inline int scenario_level(const std::string& name) {
  if (name == "pfc_step" || name == "no_pfc_comparison") return 1;
  if (name == "vdcq_step") return 3;
  if (name == "charge") return 0;
  throw std::invalid_argument("unknown scenario: " + name);
}

[[nodiscard]] inline Scenario step_test_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "pfc_step") {
    s.kind = ModelKind::pfc_example;
    s.config = level_defaults(1);
    s.config.v_source_rms = 80.0;
    s.config.v_dc_ref = 200.0;
    s.r_load = 200.0;
    s.duration = 12.0;
    s.commands = {{4.0, "pfc.vdc_ref", 250.0}, {8.0, "pfc.vdc_ref", 150.0}};
  } else if (name == "vdcq_step") {
    s.config = level_defaults(3);
    s.duration = 12.0;
    s.commands = {{4.0, "level3.vdc_ref", 400.0}, {8.0, "level3.q_ref", 40e3}};
  } else if (name == "no_pfc_comparison") {
    s.config = level_defaults(1);
    s.config.pfc_enabled = false;
    s.duration = 3.0;
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  return s;
}

}  // namespace evcharge::testbeds
