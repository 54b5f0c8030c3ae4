// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evcharge::sim {

// A live-tunable model parameter addressed by a dotted path such as
// "level3.vdc_ref". The table stores a pointer into the owning model, so the
// model must stay at a fixed address for the table's lifetime.
struct Parameter {
  std::string path;
  double lo = 0.0;
  double hi = 0.0;
  double* target = nullptr;
};

class ParameterTable {
 public:
  void add(std::string path, double* target, double lo, double hi) {
    if (target == nullptr) throw std::invalid_argument("parameter target is null");
    if (find(path)) throw std::invalid_argument("duplicate parameter path: " + path);
    entries_.push_back({std::move(path), lo, hi, target});
  }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view path) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].path == path) return i;
    return std::nullopt;
  }

  // Returns an error message, or nullopt when `value` may be applied to `path`.
  [[nodiscard]] std::optional<std::string> validate(std::string_view path, double value) const {
    const auto idx = find(path);
    if (!idx) return "unknown parameter path: " + std::string(path);
    const auto& p = entries_[*idx];
    if (!(value >= p.lo && value <= p.hi))
      return "value " + std::to_string(value) + " outside bounds [" + std::to_string(p.lo) + ", " +
             std::to_string(p.hi) + "] for " + p.path;
    return std::nullopt;
  }

  void set(std::size_t idx, double value) { *entries_.at(idx).target = value; }
  [[nodiscard]] double get(std::size_t idx) const { return *entries_.at(idx).target; }

  [[nodiscard]] const std::vector<Parameter>& entries() const { return entries_; }

 private:
  std::vector<Parameter> entries_;
};

}  // namespace evcharge::sim
