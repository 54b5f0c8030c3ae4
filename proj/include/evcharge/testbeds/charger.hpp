// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evcharge/testbeds/pfc_example.hpp"
#include "evcharge/testbeds/scenarios.hpp"
#include "evcharge/testbeds/single_phase.hpp"
#include "evcharge/testbeds/three_phase.hpp"

namespace evcharge::testbeds {

// Level-agnostic handle used by the CLI and the telemetry service. Each
// concrete model lives on the heap so its parameter table stays valid.
class Charger {
 public:
  using Variant =
      std::variant<std::unique_ptr<SinglePhaseCharger>, std::unique_ptr<ThreePhaseCharger>, std::unique_ptr<PfcExample>>;

  explicit Charger(const TestbedConfig& cfg, double step_size = 20e-6) : v_(make(cfg, step_size)) {}

  explicit Charger(const Scenario& s, double step_size = 20e-6)
      : v_(s.kind == ModelKind::pfc_example ? Variant(std::make_unique<PfcExample>(s.config, s.r_load))
                                            : make(s.config, step_size)) {}

  void input(const StepClock& c) {
    std::visit([&](auto& m) { m->input(c); }, v_);
  }
  void calculate(const StepClock& c) {
    std::visit([&](auto& m) { m->calculate(c); }, v_);
  }
  void output(const StepClock& c) {
    std::visit([&](auto& m) { m->output(c); }, v_);
  }
  [[nodiscard]] std::optional<std::string_view> nonfinite_block() const {
    return std::visit([](const auto& m) { return m->nonfinite_block(); }, v_);
  }
  [[nodiscard]] std::vector<std::string> signal_names() const {
    return std::visit([](const auto& m) { return m->signal_names(); }, v_);
  }
  void sample(std::span<double> out) const {
    std::visit([&](const auto& m) { m->sample(out); }, v_);
  }
  [[nodiscard]] sim::ParameterTable& parameters() {
    return std::visit([](auto& m) -> sim::ParameterTable& { return m->parameters(); }, v_);
  }

  // Charge mode and transition count; the PFC example has neither.
  [[nodiscard]] std::optional<controls::CcCvController> cccv() const {
    return std::visit(
        [](const auto& m) -> std::optional<controls::CcCvController> {
          if constexpr (requires { m->cccv(); })
            return m->cccv();
          else
            return std::nullopt;
        },
        v_);
  }

  [[nodiscard]] Variant& get() { return v_; }
  [[nodiscard]] const Variant& get() const { return v_; }

 private:
  static Variant make(const TestbedConfig& cfg, double step_size) {
    if (cfg.level == 3) return std::make_unique<ThreePhaseCharger>(cfg, step_size);
    return std::make_unique<SinglePhaseCharger>(cfg, step_size);
  }

  Variant v_;
};

}  // namespace evcharge::testbeds
