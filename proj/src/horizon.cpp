// Copyright 2026 The horizonseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hseg/horizon.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "hseg/error.hpp"

namespace hseg {

Horizon::Horizon(CubeGeometry geometry, std::string name)
    : geometry_(geometry),
      name_(std::move(name)),
      depths_(geometry.trace_count(), std::numeric_limits<double>::quiet_NaN()) {
  geometry_.validate();
}

void Horizon::set(std::size_t il, std::size_t xl, double depth) {
  if (il >= geometry_.n_inlines || xl >= geometry_.n_crosslines) {
    throw RangeError("horizon '" + name_ + "': trace (" + std::to_string(il) + ", " +
                     std::to_string(xl) + ") outside geometry");
  }
  if (!(depth >= 0.0 && depth < static_cast<double>(geometry_.n_samples))) {
    throw RangeError("horizon '" + name_ + "': depth " + std::to_string(depth) +
                     " samples outside [0, " + std::to_string(geometry_.n_samples) + ")");
  }
  double& slot = depths_[geometry_.trace_index(il, xl)];
  if (std::isnan(slot)) ++coverage_;
  slot = depth;
}

void Horizon::erase(std::size_t il, std::size_t xl) {
  double& slot = depths_[geometry_.trace_index(il, xl)];
  if (!std::isnan(slot)) --coverage_;
  slot = std::numeric_limits<double>::quiet_NaN();
}

std::optional<double> Horizon::find(std::size_t il, std::size_t xl) const {
  if (il >= geometry_.n_inlines || xl >= geometry_.n_crosslines) return std::nullopt;
  const double d = depths_[geometry_.trace_index(il, xl)];
  if (std::isnan(d)) return std::nullopt;
  return d;
}

double Horizon::mean_depth() const {
  if (coverage_ == 0) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double d : depths_) {
    if (!std::isnan(d)) sum += d;
  }
  return sum / static_cast<double>(coverage_);
}

bool Horizon::operator==(const Horizon& other) const {
  if (geometry_ != other.geometry_ || name_ != other.name_ ||
      coverage_ != other.coverage_) {
    return false;
  }
  for (std::size_t t = 0; t < depths_.size(); ++t) {
    const double a = depths_[t], b = other.depths_[t];
    if (std::isnan(a) != std::isnan(b)) return false;
    if (!std::isnan(a) && a != b) return false;
  }
  return true;
}

void HorizonSet::validate() const {
  std::set<std::string> names;
  for (const auto& h : horizons) {
    if (!names.insert(h.name()).second) {
      throw ConfigError("duplicate horizon name '" + h.name() + "'");
    }
    if (h.coverage() == 0) throw ConfigError("horizon '" + h.name() + "' has no points");
  }
}

Horizon parse_horizon(const std::string& text, const CubeGeometry& geometry,
                      std::string name) {
  Horizon h(geometry, std::move(name));
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    fields.clear();
    fields.seekg(0);
    long long il_label = 0, xl_label = 0;
    double depth_ms = 0.0;
    std::string extra;
    if (!(fields >> il_label >> xl_label >> depth_ms) || (fields >> extra)) {
      throw FormatError("horizon '" + h.name() + "': malformed line " +
                        std::to_string(line_no) + ": expected INLINE CROSSLINE DEPTH_MS");
    }
    const long long il = il_label - geometry.inline_origin;
    const long long xl = xl_label - geometry.crossline_origin;
    if (il < 0 || xl < 0 || il >= static_cast<long long>(geometry.n_inlines) ||
        xl >= static_cast<long long>(geometry.n_crosslines)) {
      throw RangeError("horizon '" + h.name() + "': line " + std::to_string(line_no) +
                       ": trace (" + std::to_string(il_label) + ", " +
                       std::to_string(xl_label) + ") outside cube");
    }
    const double depth = depth_ms / geometry.sample_interval_ms;
    if (!(depth >= 0.0 && depth < static_cast<double>(geometry.n_samples))) {
      throw RangeError("horizon '" + h.name() + "': line " + std::to_string(line_no) +
                       ": depth " + std::to_string(depth_ms) + " ms outside cube");
    }
    const auto ui = static_cast<std::size_t>(il), ux = static_cast<std::size_t>(xl);
    if (h.has(ui, ux)) {
      throw FormatError("horizon '" + h.name() + "': line " + std::to_string(line_no) +
                        ": duplicate trace (" + std::to_string(il_label) + ", " +
                        std::to_string(xl_label) + ")");
    }
    h.set(ui, ux, depth);
  }
  if (h.coverage() == 0) throw FormatError("horizon '" + h.name() + "': no points");
  return h;
}

std::string format_horizon(const Horizon& horizon) {
  const auto& g = horizon.geometry();
  std::string out;
  char buf[96];
  for (std::size_t il = 0; il < g.n_inlines; ++il) {
    for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
      const auto d = horizon.find(il, xl);
      if (!d) continue;
      std::snprintf(buf, sizeof buf, "%lld %lld %.6g\n",
                    static_cast<long long>(g.inline_origin + static_cast<std::int64_t>(il)),
                    static_cast<long long>(g.crossline_origin + static_cast<std::int64_t>(xl)),
                    *d * g.sample_interval_ms);
      out += buf;
    }
  }
  return out;
}

Horizon load_horizon(const std::filesystem::path& path, const CubeGeometry& geometry) {
  const auto bytes = detail::read_file(path);
  return parse_horizon(std::string(bytes.begin(), bytes.end()), geometry,
                       path.stem().string());
}

void save_horizon(const Horizon& horizon, const std::filesystem::path& path) {
  const auto text = format_horizon(horizon);
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

}  // namespace hseg
