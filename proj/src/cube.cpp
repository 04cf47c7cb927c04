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

#include "hseg/cube.hpp"

#include <algorithm>
#include <string>

#include "hseg/error.hpp"

namespace hseg {

std::string shape_to_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

const char* axis_name(Axis axis) {
  return axis == Axis::Inline ? "inline" : "crossline";
}

Axis parse_axis(const std::string& text) {
  if (text == "inline") return Axis::Inline;
  if (text == "crossline") return Axis::Crossline;
  throw ConfigError("unknown axis '" + text + "' (expected inline|crossline)");
}

void CubeGeometry::validate() const {
  if (n_inlines < 1 || n_crosslines < 1 || n_samples < 1) {
    throw ConfigError("cube geometry counts must be >= 1");
  }
  if (!(sample_interval_ms > 0.0)) {
    throw ConfigError("sample_interval_ms must be positive");
  }
}

Cube::Cube(CubeGeometry geometry, NdArray<float> values,
           std::vector<std::uint8_t> presence)
    : geometry_(geometry),
      values_(std::move(values)),
      presence_(std::move(presence)) {
  geometry_.validate();
  if (values_.shape() != geometry_.shape()) {
    throw FormatError("cube values " + shape_to_string(values_.shape()) +
                      " do not match geometry " +
                      shape_to_string(geometry_.shape()));
  }
  if (presence_.empty()) presence_.assign(geometry_.trace_count(), 1);
  if (presence_.size() != geometry_.trace_count()) {
    throw FormatError("presence map size does not match trace count");
  }
  const std::size_t ns = geometry_.n_samples;
  bool any = false;
  ValueRange range{};
  for (std::size_t t = 0; t < presence_.size(); ++t) {
    float* trace = values_.raw() + t * ns;
    if (!presence_[t]) {
      std::fill(trace, trace + ns, 0.0f);
      continue;
    }
    presence_[t] = 1;
    const auto [lo, hi] = std::minmax_element(trace, trace + ns);
    if (!any) {
      range = {*lo, *hi};
      any = true;
    } else {
      range.min = std::min(range.min, *lo);
      range.max = std::max(range.max, *hi);
    }
  }
  if (any) stats_ = range;
}

std::size_t Cube::live_trace_count() const {
  return static_cast<std::size_t>(
      std::count(presence_.begin(), presence_.end(), std::uint8_t{1}));
}

ValueRange value_stats(const Cube& cube) {
  if (!cube.stats()) throw RangeError("value_stats: every trace is dead");
  return *cube.stats();
}

NdArray<float> slice_section(const Cube& cube, Axis axis, std::size_t index) {
  const auto& g = cube.geometry();
  const std::size_t limit = axis == Axis::Inline ? g.n_inlines : g.n_crosslines;
  if (index >= limit) {
    throw RangeError(std::string(axis_name(axis)) + " index " +
                     std::to_string(index) + " out of range [0, " +
                     std::to_string(limit) + ")");
  }
  const std::size_t other = axis == Axis::Inline ? g.n_crosslines : g.n_inlines;
  NdArray<float> out({other, g.n_samples});
  for (std::size_t j = 0; j < other; ++j) {
    const auto tr = axis == Axis::Inline ? cube.trace(index, j)
                                         : cube.trace(j, index);
    std::copy(tr.begin(), tr.end(), out.raw() + j * g.n_samples);
  }
  return out;
}

}  // namespace hseg
