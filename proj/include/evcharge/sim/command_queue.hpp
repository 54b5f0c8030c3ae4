// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "evcharge/sim/parameters.hpp"
#include "evcharge/sim/types.hpp"

namespace evcharge::sim {

// Thread-safe intake for operator commands. Producers validate against the
// parameter metadata on submit; the engine drains the queue once per step
// boundary, so the model itself is only ever touched from the engine thread.
class CommandQueue {
 public:
  explicit CommandQueue(const ParameterTable& table) : table_(&table) {}

  // Rejections happen here, before the command can reach the model.
  [[nodiscard]] std::optional<std::string> submit(Command cmd) {
    if (auto err = table_->validate(cmd.target, cmd.value)) return err;
    std::lock_guard lock(mutex_);
    pending_.push_back(std::move(cmd));
    return std::nullopt;
  }

  // Swaps out everything queued so far. Called by the engine thread.
  void drain(std::vector<Command>& out) {
    out.clear();
    std::lock_guard lock(mutex_);
    out.swap(pending_);
  }

  [[nodiscard]] bool empty() const {
    std::lock_guard lock(mutex_);
    return pending_.empty();
  }

 private:
  const ParameterTable* table_;
  mutable std::mutex mutex_;
  std::vector<Command> pending_;
};

}  // namespace evcharge::sim
