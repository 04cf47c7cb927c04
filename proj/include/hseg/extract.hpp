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
#include <vector>

#include "hseg/horizon.hpp"
#include "hseg/ndarray.hpp"

namespace hseg {

/// Max depth difference, in samples, between picks on 4-neighbouring traces
/// that still belong to one surface.
inline constexpr double kNeighbourTolerance = 2.0;

struct Pick {
  double depth = 0.0;  // probability-weighted centroid of the run
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
};

/// Maximal runs with prob >= threshold along one trace.
std::vector<Pick> trace_picks(std::span<const float> trace, double threshold);

/// Turns a (inline, crossline, depth) probability volume into surfaces:
/// per-trace run centroids joined across neighbouring traces by flood fill.
/// Surfaces covering fewer than min_traces traces are dropped; the rest are
/// ordered by mean depth and named P1, P2, ...
HorizonSet extract_horizons(const NdArray<float>& prob, const CubeGeometry& geometry,
                            double threshold = 0.5, std::size_t min_traces = 1);

}  // namespace hseg
