// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace evcharge::sim {

enum class Pacing { accelerated, realtime };

struct SimConfig {
  double step_size = 20e-6;  // s
  double duration = 0.0;     // s
  Pacing pacing = Pacing::accelerated;
  std::int64_t decimation = 1;  // record every Nth step

  void validate() const {
    if (!(step_size > 0.0) || !std::isfinite(step_size))
      throw std::invalid_argument("step_size must be positive and finite");
    if (!(duration >= 0.0) || !std::isfinite(duration))
      throw std::invalid_argument("duration must be non-negative and finite");
    if (decimation < 1) throw std::invalid_argument("decimation must be >= 1");
    (void)total_steps();
  }

  // round(duration / step_size); rejects counts that overflow the step counter
  // or lose integer precision in double arithmetic.
  [[nodiscard]] std::int64_t total_steps() const {
    const double n = std::round(duration / step_size);
    constexpr double limit = 9007199254740992.0;  // 2^53
    if (!(n < limit)) throw std::overflow_error("duration/step_size overflows the step counter");
    return static_cast<std::int64_t>(n);
  }
};

struct StepReport {
  std::int64_t step_index = 0;
  double compute_time = 0.0;  // wall clock, s
  double idle_time = 0.0;     // s
  bool overrun = false;
};

struct RunReport {
  std::int64_t total_steps = 0;
  std::int64_t overrun_count = 0;
  double max_compute_time = 0.0;
  double mean_compute_time = 0.0;
  double wall_time = 0.0;
  bool completed = true;  // false when stopped early by the operator

  void accumulate(const StepReport& r) {
    ++total_steps;
    if (r.overrun) ++overrun_count;
    if (r.compute_time > max_compute_time) max_compute_time = r.compute_time;
    sum_compute_ += r.compute_time;
    mean_compute_time = sum_compute_ / static_cast<double>(total_steps);
  }

 private:
  double sum_compute_ = 0.0;
};

// One recorded snapshot. `values` is ordered like the model's signal names.
struct SignalFrame {
  double t = 0.0;
  std::vector<double> values;
};

struct Command {
  std::int64_t sequence = 0;
  std::string target;
  double value = 0.0;
};

struct CommandAck {
  std::int64_t sequence = 0;
  std::int64_t applied_step = 0;
};

// A command scheduled at a simulation time; applied at the first step
// boundary with t >= time.
struct ScheduledCommand {
  double time = 0.0;
  std::string target;
  double value = 0.0;
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::string block, std::int64_t step, const std::string& what)
      : std::runtime_error(what), block_(std::move(block)), step_(step) {}

  [[nodiscard]] const std::string& block() const { return block_; }
  [[nodiscard]] std::int64_t step() const { return step_; }

 private:
  std::string block_;
  std::int64_t step_;
};

}  // namespace evcharge::sim
