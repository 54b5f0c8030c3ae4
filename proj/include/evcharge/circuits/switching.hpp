// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace evcharge::circuits {

// Upper-switch on-fraction of one bridge leg over a simulation step. The
// lower switch is its complement, so both switches of a leg can never be on
// together. Boolean gating is the special case 0 or 1; fractional values
// carry the exact switching instant of an edge that falls inside the step.
class Leg {
 public:
  constexpr Leg() = default;
  constexpr explicit Leg(double upper_on_fraction) : upper_(std::clamp(upper_on_fraction, 0.0, 1.0)) {}
  static constexpr Leg from_gate(bool upper_on) { return Leg(upper_on ? 1.0 : 0.0); }

  [[nodiscard]] constexpr double upper() const { return upper_; }
  [[nodiscard]] constexpr double lower() const { return 1.0 - upper_; }
  // Average switching function in [-1, 1]: +1 upper on, -1 lower on.
  [[nodiscard]] constexpr double polarity() const { return 2.0 * upper_ - 1.0; }

 private:
  double upper_ = 0.0;
};

template <std::size_t N>
struct GateSet {
  std::array<Leg, N> legs{};
};

// Full H-bridge with 50 % square-wave operation: the second leg is the
// complement of the first, so the bridge voltage is polarity * v_dc.
using HBridgeGates = GateSet<1>;
using ThreePhaseGates = GateSet<3>;

// Symmetric triangle carrier in [-1, 1]. Phase p is measured in carrier
// periods; the carrier starts at -1 for p = 0, peaks at +1 for p = 0.5.
[[nodiscard]] inline double triangle(double phase) {
  const double f = phase - std::floor(phase);
  return f < 0.5 ? 4.0 * f - 1.0 : 3.0 - 4.0 * f;
}

// A set that is "on" over [begin, begin + width) in every carrier period
// (phases in periods, width in [0, 1]). on_time(a, b) integrates the
// indicator over the phase interval [a, b].
struct PeriodicWindow {
  double begin = 0.0;
  double width = 0.0;

  [[nodiscard]] double cumulative(double x) const {
    // On-time in [0, x), x >= 0 in periods.
    const double w = std::clamp(width, 0.0, 1.0);
    const double b = begin - std::floor(begin);
    const double whole = std::floor(x);
    const double f = x - whole;
    auto within = [&](double y) {
      // overlap of [0, y) with [b, b + w) and its wrap [b - 1, b + w - 1)
      const double first = std::max(0.0, std::min(y, b + w) - b);
      const double wrapped = std::max(0.0, std::min(y, b + w - 1.0));
      return first + wrapped;
    };
    return whole * w + within(f);
  }

  [[nodiscard]] double fraction(double phase_begin, double phase_span) const {
    if (phase_span <= 0.0) return contains(phase_begin) ? 1.0 : 0.0;
    const double shift = std::floor(phase_begin);
    const double a = phase_begin - shift;
    return (cumulative(a + phase_span) - cumulative(a)) / phase_span;
  }

  [[nodiscard]] bool contains(double phase) const {
    const double f = phase - std::floor(phase);
    const double b = begin - std::floor(begin);
    const double rel = f - b;
    return (rel >= 0.0 ? rel : rel + 1.0) < std::clamp(width, 0.0, 1.0);
  }
};

}  // namespace evcharge::circuits
