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

#include <array>
#include <cstddef>
#include <string>

#include "hseg/cube.hpp"

namespace hseg {

using Triple = std::array<std::size_t, 3>;

/// Axis-aligned sub-volume: origin and extent along (inline, crossline, depth).
struct CropWindow {
  Triple origin{0, 0, 0};
  Triple shape{1, 1, 1};

  bool fits(const CubeGeometry& geometry) const;
  /// Throws RangeError unless the window lies inside the geometry.
  void check(const CubeGeometry& geometry) const;
  std::string to_string() const;

  bool operator==(const CropWindow&) const = default;
};

}  // namespace hseg
