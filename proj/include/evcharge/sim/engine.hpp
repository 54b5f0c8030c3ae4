// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <concepts>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "evcharge/sim/block_graph.hpp"
#include "evcharge/sim/command_queue.hpp"
#include "evcharge/sim/parameters.hpp"
#include "evcharge/sim/recording.hpp"
#include "evcharge/sim/types.hpp"

namespace evcharge::sim {

// What the engine needs from a model. Testbeds satisfy it through BlockGraph.
template <class M>
concept SimModel = requires(M& m, const M& cm, const StepClock& c, std::span<double> out) {
  m.input(c);
  m.calculate(c);
  m.output(c);
  { cm.nonfinite_block() } -> std::convertible_to<std::optional<std::string_view>>;
  { cm.signal_names() } -> std::convertible_to<std::vector<std::string>>;
  cm.sample(out);
  { m.parameters() } -> std::same_as<ParameterTable&>;
};

struct NoObserver {
  template <class M>
  void operator()(const M&, const StepClock&) const {}
};

enum class RunState { paused, running, stopping };

struct RunResult {
  RunReport report;
  Recording frames;
};

// Fixed-step executor. One thread calls run()/step(); any thread may submit
// commands or change the run state.
template <SimModel Model>
class Engine {
 public:
  using Clock = std::chrono::steady_clock;
  using AckHandler = std::function<void(const CommandAck&)>;
  using FrameHandler = std::function<void(const SignalFrame&)>;

  Engine(Model& model, SimConfig cfg)
      : model_(&model), cfg_(cfg), commands_(model.parameters()), names_(model.signal_names()) {
    cfg_.validate();
    scratch_.resize(names_.size());
  }

  [[nodiscard]] const SimConfig& config() const { return cfg_; }
  [[nodiscard]] CommandQueue& commands() { return commands_; }
  [[nodiscard]] std::int64_t next_step() const { return next_step_.load(); }
  [[nodiscard]] const std::vector<std::string>& signal_names() const { return names_; }

  void on_ack(AckHandler h) { ack_handler_ = std::move(h); }

  // Frames handed to `h` every `every_n_steps` steps, independent of the
  // recording decimation. Called on the engine thread.
  void on_frame(FrameHandler h, std::int64_t every_n_steps) {
    frame_handler_ = std::move(h);
    emit_every_ = std::max<std::int64_t>(1, every_n_steps);
  }

  // Live sessions stream frames instead of keeping the whole history.
  void set_recording_enabled(bool on) { record_ = on; }

  void set_state(RunState s) {
    {
      std::lock_guard lock(state_mutex_);
      state_ = s;
    }
    state_cv_.notify_all();
  }
  [[nodiscard]] RunState state() const {
    std::lock_guard lock(state_mutex_);
    return state_;
  }

  // One input -> calculation -> output -> record cycle at the current index.
  StepReport step() {
    const std::int64_t k = next_step_.load(std::memory_order_relaxed);
    const auto start = Clock::now();
    StepClock clk{k, static_cast<double>(k) * cfg_.step_size, cfg_.step_size};

    apply_pending(k);
    model_->input(clk);
    model_->calculate(clk);
    model_->output(clk);
    if (auto bad = model_->nonfinite_block())
      throw SimulationError(std::string(*bad), k,
                            "non-finite state in block '" + std::string(*bad) + "' at step " + std::to_string(k));

    const std::int64_t done = k + 1;
    const bool rec = record_ && done % cfg_.decimation == 0;
    const bool emit = frame_handler_ && done % emit_every_ == 0;
    if (rec || emit) {
      model_->sample(std::span<double>(scratch_));
      const double t = static_cast<double>(done) * cfg_.step_size;
      if (rec) recording_.append(t, scratch_.data());
      if (emit) frame_handler_(SignalFrame{t, scratch_});
    }

    const double compute = std::chrono::duration<double>(Clock::now() - start).count();
    StepReport r{k, compute, 0.0, false};
    if (cfg_.pacing == Pacing::realtime) {
      r.overrun = compute > cfg_.step_size;
      r.idle_time = std::max(0.0, cfg_.step_size - compute);
      const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                        std::chrono::duration<double>(cfg_.step_size));
      while (Clock::now() < deadline) std::this_thread::yield();
    }
    next_step_.store(done, std::memory_order_relaxed);
    return r;
  }

  // Executes the configured duration. `schedule` entries fire at the first
  // step boundary at or after their time. The observer sees the model after
  // every step (used for full-rate measurements).
  template <class Observer = NoObserver>
  RunResult run(std::vector<ScheduledCommand> schedule = {}, Observer&& observer = {}) {
    const std::int64_t total = cfg_.total_steps();
    std::stable_sort(schedule.begin(), schedule.end(),
                     [](const auto& a, const auto& b) { return a.time < b.time; });
    schedule_.clear();
    for (const auto& s : schedule) {
      const auto idx = model_->parameters().find(s.target);
      if (!idx) throw std::invalid_argument("scheduled command targets unknown path " + s.target);
      if (auto err = model_->parameters().validate(s.target, s.value)) throw std::invalid_argument(*err);
      const auto at = static_cast<std::int64_t>(std::ceil(s.time / cfg_.step_size - 1e-9));
      schedule_.push_back({std::max<std::int64_t>(at, 0), *idx, s.value});
    }
    schedule_pos_ = 0;

    recording_ = Recording(names_);
    // Up-front room for typical runs; longer ones grow on demand.
    if (record_) recording_.reserve(static_cast<std::size_t>(std::min<std::int64_t>(total / cfg_.decimation, 1 << 20)) + 1);

    RunReport report;
    const auto wall_start = Clock::now();
    next_step_.store(0);
    while (next_step_.load(std::memory_order_relaxed) < total) {
      if (!wait_while_paused()) {
        report.completed = false;
        break;
      }
      const StepReport r = step();
      report.accumulate(r);
      observer(*model_, StepClock{r.step_index, static_cast<double>(r.step_index) * cfg_.step_size,
                                  cfg_.step_size});
    }
    report.wall_time = std::chrono::duration<double>(Clock::now() - wall_start).count();
    return RunResult{report, std::move(recording_)};
  }

 private:
  struct Pending {
    std::int64_t step;
    std::size_t param;
    double value;
  };

  void apply_pending(std::int64_t k) {
    auto& table = model_->parameters();
    while (schedule_pos_ < schedule_.size() && schedule_[schedule_pos_].step <= k) {
      table.set(schedule_[schedule_pos_].param, schedule_[schedule_pos_].value);
      ++schedule_pos_;
    }
    if (commands_.empty()) return;
    commands_.drain(drained_);
    // Later entries win; every drained command is acknowledged with the same step.
    for (const auto& c : drained_)
      if (auto idx = table.find(c.target)) table.set(*idx, c.value);
    if (ack_handler_)
      for (const auto& c : drained_) ack_handler_(CommandAck{c.sequence, k});
  }

  // Returns false when the run should end.
  bool wait_while_paused() {
    std::unique_lock lock(state_mutex_);
    if (state_ == RunState::running) return true;
    if (state_ == RunState::stopping) return false;
    state_cv_.wait(lock, [&] { return state_ != RunState::paused; });
    return state_ == RunState::running;
  }

  Model* model_;
  SimConfig cfg_;
  CommandQueue commands_;
  std::vector<std::string> names_;
  std::vector<double> scratch_;
  Recording recording_;
  bool record_ = true;

  std::vector<Pending> schedule_;
  std::size_t schedule_pos_ = 0;
  std::vector<Command> drained_;

  AckHandler ack_handler_;
  FrameHandler frame_handler_;
  std::int64_t emit_every_ = 1;

  std::atomic<std::int64_t> next_step_{0};
  mutable std::mutex state_mutex_;
  std::condition_variable state_cv_;
  RunState state_ = RunState::running;
};

// Convenience wrapper: build an engine and run a whole config.
template <SimModel Model, class Observer = NoObserver>
RunResult run(Model& model, const SimConfig& cfg, std::vector<ScheduledCommand> schedule = {},
              Observer&& observer = {}) {
  Engine<Model> engine(model, cfg);
  return engine.run(std::move(schedule), std::forward<Observer>(observer));
}

}  // namespace evcharge::sim
