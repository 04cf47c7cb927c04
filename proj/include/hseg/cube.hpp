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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hseg/ndarray.hpp"

namespace hseg {

/// Spatial axis selector for sections and for the network channel axis.
enum class Axis { Inline, Crossline };

const char* axis_name(Axis axis);
Axis parse_axis(const std::string& text);

/// Survey geometry. Depth is counted in samples; milliseconds enter only via
/// sample_interval_ms.
struct CubeGeometry {
  std::size_t n_inlines = 1;
  std::size_t n_crosslines = 1;
  std::size_t n_samples = 1;
  double sample_interval_ms = 2.0;
  std::int64_t inline_origin = 0;
  std::int64_t crossline_origin = 0;

  void validate() const;
  std::size_t trace_count() const { return n_inlines * n_crosslines; }
  std::size_t trace_index(std::size_t il, std::size_t xl) const {
    return il * n_crosslines + xl;
  }
  Shape shape() const { return {n_inlines, n_crosslines, n_samples}; }

  bool operator==(const CubeGeometry&) const = default;
};

struct ValueRange {
  float min = 0.0f;
  float max = 0.0f;
  bool operator==(const ValueRange&) const = default;
};

/// Immutable amplitude volume in (inline, crossline, depth) order. Dead traces
/// are zero-filled and excluded from the value range.
class Cube {
 public:
  Cube() = default;
  /// Presence defaults to all-live when empty. Dead traces are zeroed here.
  Cube(CubeGeometry geometry, NdArray<float> values,
       std::vector<std::uint8_t> presence = {});

  const CubeGeometry& geometry() const { return geometry_; }
  const NdArray<float>& values() const { return values_; }
  const std::vector<std::uint8_t>& presence() const { return presence_; }
  bool is_live(std::size_t il, std::size_t xl) const {
    return presence_[geometry_.trace_index(il, xl)] != 0;
  }
  std::size_t live_trace_count() const;

  /// Range over live traces; empty when every trace is dead.
  const std::optional<ValueRange>& stats() const { return stats_; }

  std::span<const float> trace(std::size_t il, std::size_t xl) const {
    return values_.data().subspan(
        geometry_.trace_index(il, xl) * geometry_.n_samples,
        geometry_.n_samples);
  }

  bool operator==(const Cube&) const = default;

 private:
  CubeGeometry geometry_;
  NdArray<float> values_;
  std::vector<std::uint8_t> presence_;
  std::optional<ValueRange> stats_;
};

/// Min and max over live traces. Throws RangeError when all traces are dead.
ValueRange value_stats(const Cube& cube);

/// Copy of one section: (n_crosslines x n_samples) for an inline section,
/// (n_inlines x n_samples) for a crossline section.
NdArray<float> slice_section(const Cube& cube, Axis axis, std::size_t index);

}  // namespace hseg
