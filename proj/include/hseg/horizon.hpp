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

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hseg/cube.hpp"

namespace hseg {

/// Depth surface over a cube geometry: at most one fractional depth (in
/// samples) per trace. Absent traces are holes.
class Horizon {
 public:
  Horizon() = default;
  Horizon(CubeGeometry geometry, std::string name);

  const CubeGeometry& geometry() const { return geometry_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Throws RangeError for a trace outside the geometry or a depth outside
  /// [0, n_samples).
  void set(std::size_t il, std::size_t xl, double depth);
  void erase(std::size_t il, std::size_t xl);

  bool has(std::size_t il, std::size_t xl) const {
    return !std::isnan(depths_[geometry_.trace_index(il, xl)]);
  }
  std::optional<double> find(std::size_t il, std::size_t xl) const;
  /// Dense trace-major depth map; NaN marks a hole.
  std::span<const double> depths() const { return depths_; }

  std::size_t coverage() const { return coverage_; }
  double mean_depth() const;

  bool operator==(const Horizon& other) const;

 private:
  CubeGeometry geometry_;
  std::string name_;
  std::vector<double> depths_;
  std::size_t coverage_ = 0;
};

enum class HorizonSource { GroundTruth, Predicted };

struct HorizonSet {
  std::vector<Horizon> horizons;
  HorizonSource source = HorizonSource::GroundTruth;

  std::size_t size() const { return horizons.size(); }
  bool empty() const { return horizons.empty(); }
  /// Names unique, every horizon non-empty.
  void validate() const;
};

/// Text format: "INLINE CROSSLINE DEPTH_MS" per line, '#' starts a comment.
/// Inline/crossline are survey labels (geometry origin applies).
Horizon parse_horizon(const std::string& text, const CubeGeometry& geometry,
                      std::string name);
std::string format_horizon(const Horizon& horizon);

Horizon load_horizon(const std::filesystem::path& path,
                     const CubeGeometry& geometry);
void save_horizon(const Horizon& horizon, const std::filesystem::path& path);

}  // namespace hseg
