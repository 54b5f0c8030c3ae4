// SPDX-License-Identifier: Apache-2.0
// evcharge: batch runs, design calculations, analysis exports and the live
// telemetry service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evcharge/design/design.hpp"
#include "evcharge/sim/engine.hpp"
#include "evcharge/telemetry/server.hpp"
#include "evcharge/testbeds/charger.hpp"

namespace {

using namespace evcharge;

struct ModelArgs {
  int level = 0;
  std::string config;
  std::string scenario;
  std::vector<std::string> overrides;
  double duration = -1.0;
  double step = 20e-6;
};

void add_model_options(CLI::App* app, ModelArgs& a) {
  app->add_option("--level", a.level, "Charging level")->check(CLI::Range(1, 3));
  app->add_option("--config", a.config, "INI config file")->check(CLI::ExistingFile);
  app->add_option("--scenario", a.scenario, "charge | pfc_step | vdcq_step | no_pfc_comparison");
  app->add_option("--set", a.overrides, "Config override section.key=value (repeatable)");
  app->add_option("--duration", a.duration, "Simulated time, s (default: scenario length)");
  app->add_option("--step", a.step, "Step size, s")->check(CLI::PositiveNumber);
}

// Resolves level / config / scenario flags into one scenario.
testbeds::Scenario resolve(const ModelArgs& a) {
  testbeds::Scenario s;
  const bool named = !a.scenario.empty() && a.scenario != "charge";
  if (named) {
    const int want = testbeds::scenario_level(a.scenario);
    if (a.level != 0 && a.level != want)
      throw std::invalid_argument("scenario " + a.scenario + " runs at level " + std::to_string(want) + ", not level " +
                                  std::to_string(a.level));
    if (!a.config.empty()) throw std::invalid_argument("--config cannot be combined with a step-test scenario");
    s = testbeds::step_test_scenario(a.scenario);
  } else {
    if (!a.scenario.empty()) (void)testbeds::scenario_level(a.scenario);
    if (a.config.empty()) {
      s = testbeds::default_scenario(a.level == 0 ? 1 : a.level);
    } else {
      std::ifstream f(a.config);
      s = testbeds::default_scenario(1);
      s.config = testbeds::read_config(f);
      if (a.level != 0 && a.level != s.config.level)
        throw std::invalid_argument("--level disagrees with the config file");
    }
  }
  for (const auto& o : a.overrides) testbeds::apply_override(s.config, o);
  if (a.duration >= 0.0) s.duration = a.duration;
  std::erase_if(s.commands, [&](const auto& c) { return c.time > s.duration; });
  s.validate();
  return s;
}

void print_report(const sim::RunReport& r, const testbeds::Charger& m, const sim::Recording& rec) {
  std::printf("steps            %lld\n", static_cast<long long>(r.total_steps));
  std::printf("overruns         %lld\n", static_cast<long long>(r.overrun_count));
  std::printf("wall time        %.3f s\n", r.wall_time);
  std::printf("mean step        %.3f us\n", r.mean_compute_time * 1e6);
  std::printf("max step         %.3f us\n", r.max_compute_time * 1e6);
  if (!rec.empty() && std::find(rec.names().begin(), rec.names().end(), "soc") != rec.names().end())
    std::printf("end SOC          %.3f %%\n", rec.value(rec.size() - 1, rec.column("soc")));
  if (auto c = m.cccv()) {
    std::printf("end mode         %s\n", controls::to_string(c->mode));
    std::printf("CC->CV switches  %d\n", c->transitions);
  }
}

int cmd_run(const ModelArgs& a, std::int64_t decimate, bool realtime, const std::string& out) {
  const auto s = resolve(a);
  testbeds::Charger model(s, a.step);
  sim::SimConfig sc;
  sc.step_size = a.step;
  sc.duration = s.duration;
  sc.decimation = decimate;
  sc.pacing = realtime ? sim::Pacing::realtime : sim::Pacing::accelerated;
  const auto result = sim::run(model, sc, s.commands);
  if (!out.empty()) sim::write_csv(out, result.frames);
  print_report(result.report, model, result.frames);
  return 0;
}

int cmd_serve(const ModelArgs& a, unsigned short port) {
  const auto s = resolve(a);
  testbeds::Charger model(s, a.step);
  sim::SimConfig sc;
  sc.step_size = a.step;
  sc.duration = s.duration;
  sc.pacing = sim::Pacing::realtime;
  sim::Engine<testbeds::Charger> engine(model, sc);
  engine.set_recording_enabled(false);
  engine.set_state(sim::RunState::paused);
  telemetry::Service<testbeds::Charger> service(engine, telemetry::bind_address(), port);
  service.start();
  std::printf("serving on %s:%u (paused; send start)\n", telemetry::bind_address().c_str(), service.port());
  std::fflush(stdout);
  const auto result = engine.run(s.commands);
  service.finish(result.report);
  print_report(result.report, model, result.frames);
  return 0;
}

void emit(const std::string& out, const auto& table) {
  if (out.empty()) {
    design::write_csv(std::cout, table);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out);
    design::write_csv(f, table);
  }
}

// Level operating point for the DAB loop analysis: bus voltage, series
// inductance, CV voltage and CC current from the level presets.
design::DabOperatingPoint level_point(int level, double theta_deg) {
  const auto c = testbeds::level_defaults(level);
  design::DabOperatingPoint op;
  op.v_in = c.v_dc_ref;
  op.v_out = c.v_cv;
  op.r_load = c.v_cv / c.i_cc;
  op.w_sw = 2.0 * design::kPi * c.f_pwm;
  op.l_r = c.l_r;
  op.theta = theta_deg * design::kPi / 180.0;
  return op;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV charging real-time simulation suite"};
  app.require_subcommand(1);

  ModelArgs run_args;
  std::int64_t decimate = 1000;
  bool realtime = false;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run a scenario and write the recorded signals");
  add_model_options(run, run_args);
  run->add_option("--decimate", decimate, "Record every Nth step")->check(CLI::PositiveNumber);
  run->add_flag("--realtime", realtime, "Pace steps to wall-clock time");
  run->add_option("--out", run_out, "CSV output path");

  ModelArgs serve_args;
  unsigned short port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve live telemetry for a paused run");
  add_model_options(serve, serve_args);
  serve->add_option("--port", port, "TCP port");

  auto* design_cmd = app.add_subcommand("design", "Component sizing");
  design_cmd->require_subcommand(1);
  double iout = 36, ripple = 10, freq = 60;
  auto* pfc_cap = design_cmd->add_subcommand("pfc-cap", "DC-bus capacitor for a given ripple");
  pfc_cap->add_option("--iout", iout, "Output current, A");
  pfc_cap->add_option("--ripple", ripple, "Peak-to-peak ripple, V");
  pfc_cap->add_option("--freq", freq, "Line frequency, Hz");
  double vin = 120, vout = 400, fsw = 2000, di = 1;
  auto* boost_l = design_cmd->add_subcommand("boost-l", "Boost inductor for a given current ripple");
  boost_l->add_option("--vin", vin, "Input voltage, V");
  boost_l->add_option("--vout", vout, "Output voltage, V");
  boost_l->add_option("--fsw", fsw, "Switching frequency, Hz");
  boost_l->add_option("--di", di, "Current ripple, A");

  auto* analyze = app.add_subcommand("analyze", "Frequency and step responses as CSV");
  analyze->require_subcommand(1);
  int a_level = 1;
  double kp = 0.01, ki = 0.1, theta = 12.0, kr = 1000, wc = 200, w0 = 377, t_end = 10.0;
  std::string a_out;
  auto* dab_bode = analyze->add_subcommand("dab-bode", "Closed-loop DAB current loop");
  auto* dab_step = analyze->add_subcommand("dab-step", "DAB current loop unit-step response");
  for (auto* sub : {dab_bode, dab_step}) {
    sub->add_option("--level", a_level, "Operating point level")->check(CLI::Range(1, 3));
    sub->add_option("--kp", kp, "Proportional gain");
    sub->add_option("--ki", ki, "Integral gain");
    sub->add_option("--theta", theta, "Phase shift at the operating point, deg");
    sub->add_option("--out", a_out, "CSV output path (default stdout)");
  }
  dab_step->add_option("--t-end", t_end, "Response length, s")->check(CLI::PositiveNumber);
  auto* pr_bode = analyze->add_subcommand("pr-bode", "PR controller frequency response");
  double pr_kp = 200;
  pr_bode->add_option("--kp", pr_kp, "Proportional gain");
  pr_bode->add_option("--kr", kr, "Resonant gain");
  pr_bode->add_option("--wc", wc, "Cutoff, rad/s")->check(CLI::PositiveNumber);
  pr_bode->add_option("--w0", w0, "Resonance, rad/s")->check(CLI::PositiveNumber);
  pr_bode->add_option("--out", a_out, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args, decimate, realtime, run_out);
    if (*serve) return cmd_serve(serve_args, port);
    if (*pfc_cap) {
      const double c = design::pfc_cap_size(iout, freq, ripple);
      std::printf("I_out %g A, f %g Hz, dV %g V\nC = I / (2 pi f dV) = %.6g F (%.3f mF)\n", iout, freq, ripple, c,
                  c * 1e3);
      return 0;
    }
    if (*boost_l) {
      const auto s = design::boost_inductor_size(vin, vout, fsw, di);
      std::printf("V_in %g V, V_out %g V, f_sw %g Hz, dI %g A\nD = (V_out - V_in) / V_out = %.4f\n"
                  "L = (V_out - V_in) D / (f_sw dI) = %.6g H (%.3f mH)\n",
                  vin, vout, fsw, di, s.duty, s.inductance, s.inductance * 1e3);
      return 0;
    }
    if (*dab_bode || *dab_step) {
      const double k2 = design::dab_gain_k2(level_point(a_level, theta));
      std::fprintf(stderr, "K2 = %.4f A/rad\n", k2);
      if (*dab_bode)
        emit(a_out, design::dab_closed_loop(kp, ki, k2));
      else
        emit(a_out, design::dab_step_response(kp, ki, k2, t_end));
      return 0;
    }
    if (*pr_bode) {
      const auto r = design::pr_bode(pr_kp, kr, wc, w0);
      std::fprintf(stderr, "peak at %.2f rad/s\n", r[design::peak_index(r)].w);
      emit(a_out, r);
      return 0;
    }
  } catch (const sim::SimulationError& e) {
    std::fprintf(stderr, "simulation error in block %s at step %lld: %s\n", e.block().c_str(),
                 static_cast<long long>(e.step()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
