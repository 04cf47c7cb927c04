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
#include <optional>
#include <utility>
#include <vector>

#include "hseg/horizon.hpp"

namespace hseg {

/// Mean depth gap, in samples, above which a prediction is not paired.
inline constexpr double kMaxMatchDistance = 25.0;

/// Per-horizon quality. The error fields are empty when prediction and truth
/// share no trace.
struct MetricRow {
  double coverage_pct = 0.0;
  std::optional<double> mean_error_ms;
  std::optional<double> window_pct;
  double window_ms = 5.0;
};

/// coverage = common / truth traces; mean error = mean |pred - truth| in ms
/// over common traces; window = share of common traces within window_ms.
MetricRow compare_horizons(const Horizon& pred, const Horizon& truth, double window_ms,
                           double interval_ms);

/// Mean |pred - truth| in samples over common traces; empty when disjoint.
std::optional<double> mean_depth_gap(const Horizon& a, const Horizon& b);

struct HorizonMatch {
  std::size_t pred = 0;
  std::size_t truth = 0;
  bool operator==(const HorizonMatch&) const = default;
};

/// Greedy pairing by ascending mean gap; gaps above kMaxMatchDistance and
/// disjoint pairs stay unmatched. Result is ordered by truth index.
std::vector<HorizonMatch> match_horizons(const HorizonSet& pred, const HorizonSet& truth,
                                         double max_distance = kMaxMatchDistance);

}  // namespace hseg
