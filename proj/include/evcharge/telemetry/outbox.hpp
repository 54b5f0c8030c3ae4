// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

namespace evcharge::telemetry {

// Per-client outgoing queue. Frames are droppable: once the queue holds
// `capacity` entries the oldest frame is discarded to make room, so a slow
// client never blocks the producer. Control messages (schema, acks, errors,
// report) are never dropped.
class Outbox {
 public:
  explicit Outbox(std::size_t capacity = 256) : capacity_(capacity < 1 ? 1 : capacity) {}

  void push_frame(std::string msg) {
    std::lock_guard lock(mutex_);
    if (queue_.size() >= capacity_) {
      for (auto it = queue_.begin(); it != queue_.end(); ++it) {
        if (it->droppable) {
          queue_.erase(it);
          ++dropped_;
          break;
        }
      }
    }
    queue_.push_back({std::move(msg), true});
  }

  void push_control(std::string msg) {
    std::lock_guard lock(mutex_);
    queue_.push_back({std::move(msg), false});
  }

  [[nodiscard]] std::optional<std::string> pop() {
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return std::nullopt;
    std::string s = std::move(queue_.front().text);
    queue_.pop_front();
    return s;
  }

  [[nodiscard]] std::size_t size() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
  }
  [[nodiscard]] std::uint64_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }

 private:
  struct Entry {
    std::string text;
    bool droppable;
  };
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::deque<Entry> queue_;
  std::uint64_t dropped_ = 0;
};

}  // namespace evcharge::telemetry
