// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "evcharge/sim/types.hpp"

namespace evcharge::sim {

// Decimated signal history of one run. Values live in one flat row-major
// buffer; times are kept alongside.
class Recording {
 public:
  Recording() = default;
  explicit Recording(std::vector<std::string> names) : names_(std::move(names)) {}

  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
  [[nodiscard]] std::size_t width() const { return names_.size(); }
  [[nodiscard]] std::size_t size() const {
    return names_.empty() ? times_.size() : values_.size() / names_.size();
  }
  [[nodiscard]] bool empty() const { return times_.empty(); }

  void reserve(std::size_t rows) {
    times_.reserve(rows);
    values_.reserve(rows * names_.size());
  }

  void append(double t, const double* v) {
    times_.push_back(t);
    values_.insert(values_.end(), v, v + names_.size());
  }

  [[nodiscard]] double time(std::size_t row) const { return times_[row]; }
  [[nodiscard]] double value(std::size_t row, std::size_t col) const {
    return values_[row * names_.size() + col];
  }

  [[nodiscard]] std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    throw std::out_of_range("no recorded signal named " + std::string(name));
  }

  [[nodiscard]] std::vector<double> series(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out(size());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = value(r, c);
    return out;
  }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }

  [[nodiscard]] SignalFrame frame(std::size_t row) const {
    SignalFrame f;
    f.t = times_[row];
    f.values.assign(values_.begin() + static_cast<std::ptrdiff_t>(row * width()),
                    values_.begin() + static_cast<std::ptrdiff_t>((row + 1) * width()));
    return f;
  }

  bool operator==(const Recording&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<double> values_;
};

// Shortest representation that parses back to the identical double.
inline void append_number(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  out.append(buf, end);
}

inline void write_csv(std::ostream& os, const Recording& rec) {
  std::string line = "t";
  for (const auto& n : rec.names()) {
    line += ',';
    line += n;
  }
  line += '\n';
  os << line;
  for (std::size_t r = 0; r < rec.size(); ++r) {
    line.clear();
    append_number(line, rec.time(r));
    for (std::size_t c = 0; c < rec.width(); ++c) {
      line += ',';
      append_number(line, rec.value(r, c));
    }
    line += '\n';
    os << line;
  }
}

inline void write_csv(const std::string& path, const Recording& rec) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(f, rec);
}

inline double parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("malformed CSV number: " + std::string(s));
  return v;
}

inline Recording read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.front() != "t") throw std::runtime_error("CSV header must start with t");
  Recording rec(std::vector<std::string>(header.begin() + 1, header.end()));
  std::vector<double> row(rec.width());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    std::size_t col = 0;
    double t = 0.0;
    while (true) {
      const std::size_t next = line.find(',', pos);
      const std::string_view cell(line.data() + pos, (next == std::string::npos ? line.size() : next) - pos);
      if (col == 0)
        t = parse_number(cell);
      else if (col - 1 < row.size())
        row[col - 1] = parse_number(cell);
      ++col;
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (col != rec.width() + 1) throw std::runtime_error("CSV row has wrong column count");
    rec.append(t, row.data());
  }
  return rec;
}

}  // namespace evcharge::sim
