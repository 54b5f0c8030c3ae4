// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <tuple>
#include <utility>

namespace evcharge::sim {

// Time of the step being executed: t = index * step_size.
struct StepClock {
  std::int64_t index = 0;
  double t = 0.0;
  double step_size = 0.0;
};

// A block is any type with a `name` and some subset of the phase hooks
//   void sense(Bus&, const StepClock&)      input: publish measurements
//   void calculate(Bus&, const StepClock&)  calculation: controllers
//   void integrate(Bus&, const StepClock&)  output: advance circuit state
//   bool finite() const                     numerical health of the state
// Missing hooks are skipped at compile time.
template <class B, class Bus>
concept Block = requires(const B& b) {
  { b.name } -> std::convertible_to<std::string_view>;
};

// Fixed-order composition of blocks around a shared signal bus. The order of
// the template arguments is the execution order inside every phase.
template <class Bus, class... Blocks>
class BlockGraph {
 public:
  Bus bus{};
  std::tuple<Blocks...> blocks;

  BlockGraph() = default;
  explicit BlockGraph(Blocks... b) : blocks(std::move(b)...) {}

  void input(const StepClock& c) {
    std::apply([&](auto&... b) { (sense_one(b, c), ...); }, blocks);
  }
  void calculate(const StepClock& c) {
    std::apply([&](auto&... b) { (calc_one(b, c), ...); }, blocks);
  }
  void output(const StepClock& c) {
    std::apply([&](auto&... b) { (integrate_one(b, c), ...); }, blocks);
  }

  // Name of the first block whose state is not finite, in execution order.
  [[nodiscard]] std::optional<std::string_view> nonfinite_block() const {
    std::optional<std::string_view> bad;
    std::apply(
        [&](const auto&... b) {
          ((bad || finite_one(b) ? void() : void(bad = std::string_view(b.name))), ...);
        },
        blocks);
    return bad;
  }

  template <class B>
  B& get() {
    return std::get<B>(blocks);
  }
  template <class B>
  const B& get() const {
    return std::get<B>(blocks);
  }

 private:
  template <class B>
  void sense_one(B& b, const StepClock& c) {
    if constexpr (requires { b.sense(bus, c); }) b.sense(bus, c);
  }
  template <class B>
  void calc_one(B& b, const StepClock& c) {
    if constexpr (requires { b.calculate(bus, c); }) b.calculate(bus, c);
  }
  template <class B>
  void integrate_one(B& b, const StepClock& c) {
    if constexpr (requires { b.integrate(bus, c); }) b.integrate(bus, c);
  }
  template <class B>
  static bool finite_one(const B& b) {
    if constexpr (requires { b.finite(); })
      return b.finite();
    else
      return true;
  }
};

}  // namespace evcharge::sim
