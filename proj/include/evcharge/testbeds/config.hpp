// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace evcharge::testbeds {

struct TestbedConfig {
  int level = 1;

  // source
  double v_source_rms = 120.0;  // V; line-to-line for level 3
  double f_grid = 60.0;
  double r_g = 3e-3;
  double l_g = 3e-3;

  // front end
  double l_pfc = 10e-3;
  double c_dc = 9.5e-3;
  double v_dc_ref = 300.0;
  bool pfc_enabled = true;
  double fixed_duty = 0.64;  // used when pfc_enabled is false

  // DAB and output filter
  double f_pwm = 2000.0;
  double l_r = 1e-3;
  double r_r = 0.01;  // ohm, damps the DC offset of the series inductor
  double n = 1.0;
  double l_out = 95e-3;
  double c_out = 0.1e-3;

  // battery
  double soc0 = 10.0;  // %
  double r_int = 0.06;

  // CC/CV
  double i_cc = 5.0;
  double v_cv = 262.0;
  double i_cc_slew = 0.0;  // A/s; 0 sets it to I_CC per second

  // level 3 only
  double q_ref = 30e3;  // var

  // gains
  double pfc_outer_kp = 0.0005, pfc_outer_ki = 0.005;
  double pfc_inner_kp = 0.1, pfc_inner_ki = 0.1;
  double cccv_kp = 0.01, cccv_ki = 0.1;
  double cv_kp = 0.5, cv_ki = 5.0;
  double vdc_kp = 0.1, vdc_ki = 1.0;
  double q_kp = 0.01, q_ki = 0.1;
  double pr_kp = 200.0, pr_kr = 1000.0, pr_wc = 200.0, pr_w0 = 377.0;
  double pll_kp = 0.05, pll_ki = 1.0;
  double pq_tau = 3.2e-3;  // s

  void validate() const;
};

[[nodiscard]] inline TestbedConfig level_defaults(int level) {
  TestbedConfig c;
  c.level = level;
  switch (level) {
    case 1:
      break;
    case 2:
      c.v_source_rms = 240.0;
      c.l_r = 0.13e-3;
      c.i_cc = 40.0;
      c.v_cv = 273.0;
      break;
    case 3:
      c.v_source_rms = 208.0;
      c.l_r = 0.13e-3;
      c.l_out = 100e-3;
      c.c_dc = 30e-3;
      c.v_dc_ref = 350.0;
      c.i_cc = 80.0;
      c.v_cv = 279.0;
      break;
    default:
      throw std::invalid_argument("level must be 1, 2 or 3");
  }
  return c;
}

namespace detail {

// One table drives parsing, writing and validation so the key set cannot
// drift between them.
struct Field {
  const char* section;
  const char* key;
  std::function<double&(TestbedConfig&)> ref;
  bool positive;
};

inline const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"source", "v_rms", [](TestbedConfig& c) -> double& { return c.v_source_rms; }, true},
      {"source", "f_grid", [](TestbedConfig& c) -> double& { return c.f_grid; }, true},
      {"grid", "r_g", [](TestbedConfig& c) -> double& { return c.r_g; }, true},
      {"grid", "l_g", [](TestbedConfig& c) -> double& { return c.l_g; }, true},
      {"dc_bus", "c_dc", [](TestbedConfig& c) -> double& { return c.c_dc; }, true},
      {"dc_bus", "v_dc_ref", [](TestbedConfig& c) -> double& { return c.v_dc_ref; }, true},
      {"pfc", "l_pfc", [](TestbedConfig& c) -> double& { return c.l_pfc; }, true},
      {"pfc", "fixed_duty", [](TestbedConfig& c) -> double& { return c.fixed_duty; }, false},
      {"pfc", "outer_kp", [](TestbedConfig& c) -> double& { return c.pfc_outer_kp; }, false},
      {"pfc", "outer_ki", [](TestbedConfig& c) -> double& { return c.pfc_outer_ki; }, false},
      {"pfc", "inner_kp", [](TestbedConfig& c) -> double& { return c.pfc_inner_kp; }, false},
      {"pfc", "inner_ki", [](TestbedConfig& c) -> double& { return c.pfc_inner_ki; }, false},
      {"dab", "f_pwm", [](TestbedConfig& c) -> double& { return c.f_pwm; }, true},
      {"dab", "l_r", [](TestbedConfig& c) -> double& { return c.l_r; }, true},
      {"dab", "r_r", [](TestbedConfig& c) -> double& { return c.r_r; }, false},
      {"dab", "n", [](TestbedConfig& c) -> double& { return c.n; }, true},
      {"filter", "l_out", [](TestbedConfig& c) -> double& { return c.l_out; }, true},
      {"filter", "c_out", [](TestbedConfig& c) -> double& { return c.c_out; }, true},
      {"battery", "soc0", [](TestbedConfig& c) -> double& { return c.soc0; }, false},
      {"battery", "r_int", [](TestbedConfig& c) -> double& { return c.r_int; }, false},
      {"cccv", "i_cc", [](TestbedConfig& c) -> double& { return c.i_cc; }, false},
      {"cccv", "v_cv", [](TestbedConfig& c) -> double& { return c.v_cv; }, true},
      {"cccv", "i_cc_slew", [](TestbedConfig& c) -> double& { return c.i_cc_slew; }, false},
      {"cccv", "kp", [](TestbedConfig& c) -> double& { return c.cccv_kp; }, false},
      {"cccv", "ki", [](TestbedConfig& c) -> double& { return c.cccv_ki; }, false},
      {"cccv", "cv_kp", [](TestbedConfig& c) -> double& { return c.cv_kp; }, false},
      {"cccv", "cv_ki", [](TestbedConfig& c) -> double& { return c.cv_ki; }, false},
      {"vsc", "q_ref", [](TestbedConfig& c) -> double& { return c.q_ref; }, false},
      {"vsc", "vdc_kp", [](TestbedConfig& c) -> double& { return c.vdc_kp; }, false},
      {"vsc", "vdc_ki", [](TestbedConfig& c) -> double& { return c.vdc_ki; }, false},
      {"vsc", "q_kp", [](TestbedConfig& c) -> double& { return c.q_kp; }, false},
      {"vsc", "q_ki", [](TestbedConfig& c) -> double& { return c.q_ki; }, false},
      {"vsc", "pr_kp", [](TestbedConfig& c) -> double& { return c.pr_kp; }, false},
      {"vsc", "pr_kr", [](TestbedConfig& c) -> double& { return c.pr_kr; }, false},
      {"vsc", "pr_wc", [](TestbedConfig& c) -> double& { return c.pr_wc; }, true},
      {"vsc", "pr_w0", [](TestbedConfig& c) -> double& { return c.pr_w0; }, true},
      {"vsc", "pll_kp", [](TestbedConfig& c) -> double& { return c.pll_kp; }, false},
      {"vsc", "pll_ki", [](TestbedConfig& c) -> double& { return c.pll_ki; }, false},
      {"vsc", "pq_tau", [](TestbedConfig& c) -> double& { return c.pq_tau; }, true},
  };
  return f;
}

}  // namespace detail

inline void TestbedConfig::validate() const {
  if (level < 1 || level > 3) throw std::invalid_argument("level must be 1, 2 or 3");
  auto copy = *this;
  for (const auto& f : detail::fields()) {
    const double v = f.ref(copy);
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(f.section) + "." + f.key + " is not finite");
    if (f.positive ? !(v > 0.0) : v < 0.0)
      throw std::invalid_argument(std::string(f.section) + "." + f.key + " must be " +
                                  (f.positive ? "positive" : "non-negative"));
  }
  if (soc0 > 100.0) throw std::invalid_argument("battery.soc0 must be within [0, 100]");
  if (fixed_duty > 1.0) throw std::invalid_argument("pfc.fixed_duty must be within [0, 1]");
  if (level == 3 && !pfc_enabled) throw std::invalid_argument("pfc.enabled applies to levels 1 and 2 only");
}

// INI layout: [testbed] level = N selects the defaults, every other key
// overrides one field. Unknown sections or keys are errors.
[[nodiscard]] inline TestbedConfig read_config(std::istream& is) {
  boost::property_tree::ptree pt;
  boost::property_tree::read_ini(is, pt);
  const int level = pt.get<int>("testbed.level", 1);
  TestbedConfig c = level_defaults(level);
  for (const auto& [section, body] : pt) {
    for (const auto& [key, value] : body) {
      if (section == "testbed" && key == "level") continue;
      if (section == "pfc" && key == "enabled") {
        c.pfc_enabled = value.get_value<bool>();
        continue;
      }
      bool found = false;
      for (const auto& f : detail::fields()) {
        if (section == f.section && key == f.key) {
          f.ref(c) = value.get_value<double>();
          found = true;
          break;
        }
      }
      if (!found) throw std::invalid_argument("unknown config key " + section + "." + key);
    }
  }
  c.validate();
  return c;
}

// Applies "section.key=value" as a CLI override.
inline void apply_override(TestbedConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw std::invalid_argument("override must look like section.key=value: " + assignment);
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const std::string value = assignment.substr(eq + 1);
  if (section == "pfc" && key == "enabled") {
    c.pfc_enabled = value == "true" || value == "1";
    return;
  }
  for (const auto& f : detail::fields()) {
    if (section == f.section && key == f.key) {
      std::size_t used = 0;
      f.ref(c) = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("bad number in override: " + assignment);
      return;
    }
  }
  throw std::invalid_argument("unknown config key " + section + "." + key);
}

inline void write_config(std::ostream& os, const TestbedConfig& c) {
  boost::property_tree::ptree pt;
  pt.put("testbed.level", c.level);
  pt.put("pfc.enabled", c.pfc_enabled);
  auto copy = c;
  for (const auto& f : detail::fields()) pt.put(std::string(f.section) + "." + f.key, f.ref(copy));
  boost::property_tree::write_ini(os, pt);
}

}  // namespace evcharge::testbeds
