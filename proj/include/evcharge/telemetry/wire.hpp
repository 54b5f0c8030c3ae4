// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "evcharge/sim/types.hpp"

namespace evcharge::telemetry {

// Line-oriented JSON messages exchanged with console clients.

enum class CommandType { set, start, pause, stop };

struct ClientCommand {
  CommandType type = CommandType::set;
  std::int64_t seq = 0;
  std::string path;  // set only
  double value = 0.0;
};

// Parse failure; seq is echoed back when it could be read.
struct WireError {
  std::optional<std::int64_t> seq;
  std::string message;
};

[[nodiscard]] inline std::string schema_message(const std::vector<std::string>& signals) {
  return nlohmann::json{{"type", "schema"}, {"signals", signals}}.dump();
}

// Non-finite samples are sent as null so the line stays valid JSON.
[[nodiscard]] inline std::string frame_message(double t, const std::vector<std::string>& names,
                                               const std::vector<double>& values) {
  nlohmann::json sig = nlohmann::json::object();
  for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
    if (std::isfinite(values[i]))
      sig[names[i]] = values[i];
    else
      sig[names[i]] = nullptr;
  }
  return nlohmann::json{{"type", "frame"}, {"t", t}, {"signals", std::move(sig)}}.dump();
}

[[nodiscard]] inline std::string ack_message(std::int64_t seq, std::int64_t applied_step) {
  return nlohmann::json{{"type", "ack"}, {"seq", seq}, {"applied_step", applied_step}}.dump();
}

[[nodiscard]] inline std::string error_message(std::optional<std::int64_t> seq, const std::string& message) {
  nlohmann::json j{{"type", "error"}, {"message", message}};
  j["seq"] = seq ? nlohmann::json(*seq) : nlohmann::json(nullptr);
  return j.dump();
}

[[nodiscard]] inline std::string report_message(const sim::RunReport& r) {
  return nlohmann::json{{"type", "report"},
                        {"total_steps", r.total_steps},
                        {"overrun_count", r.overrun_count},
                        {"max_compute_time", r.max_compute_time},
                        {"mean_compute_time", r.mean_compute_time},
                        {"wall_time", r.wall_time},
                        {"completed", r.completed}}
      .dump();
}

[[nodiscard]] inline std::string command_message(const ClientCommand& c) {
  static constexpr const char* names[] = {"set", "start", "pause", "stop"};
  nlohmann::json j{{"type", names[static_cast<int>(c.type)]}, {"seq", c.seq}};
  if (c.type == CommandType::set) {
    j["path"] = c.path;
    j["value"] = c.value;
  }
  return j.dump();
}

[[nodiscard]] inline std::variant<ClientCommand, WireError> parse_command(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) return WireError{std::nullopt, "message is not valid JSON"};
  if (!j.is_object()) return WireError{std::nullopt, "message must be a JSON object"};

  std::optional<std::int64_t> seq;
  if (auto it = j.find("seq"); it != j.end() && it->is_number_integer()) seq = it->get<std::int64_t>();

  const auto type = j.find("type");
  if (type == j.end() || !type->is_string()) return WireError{seq, "field 'type' missing or not a string"};
  if (!seq) return WireError{std::nullopt, "field 'seq' missing or not an integer"};

  ClientCommand c;
  c.seq = *seq;
  const auto& t = type->get_ref<const std::string&>();
  if (t == "start") {
    c.type = CommandType::start;
  } else if (t == "pause") {
    c.type = CommandType::pause;
  } else if (t == "stop") {
    c.type = CommandType::stop;
  } else if (t == "set") {
    c.type = CommandType::set;
    const auto path = j.find("path");
    if (path == j.end() || !path->is_string()) return WireError{seq, "field 'path' missing or not a string"};
    const auto value = j.find("value");
    if (value == j.end() || !value->is_number()) return WireError{seq, "field 'value' missing or not a number"};
    c.path = path->get<std::string>();
    c.value = value->get<double>();
    if (!std::isfinite(c.value)) return WireError{seq, "field 'value' is not finite"};
  } else {
    return WireError{seq, "field 'type' has unknown value '" + t + "'"};
  }
  return c;
}

}  // namespace evcharge::telemetry
