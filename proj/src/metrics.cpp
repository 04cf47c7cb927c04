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

#include "hseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hseg/error.hpp"

namespace hseg {

MetricRow compare_horizons(const Horizon& pred, const Horizon& truth, double window_ms,
                           double interval_ms) {
  if (!(window_ms > 0.0) || !(interval_ms > 0.0)) {
    throw ConfigError("compare_horizons: window and interval must be positive");
  }
  const auto& g = truth.geometry();
  if (pred.geometry().trace_count() != g.trace_count() ||
      pred.geometry().n_crosslines != g.n_crosslines) {
    throw RangeError("compare_horizons: horizons live on different geometries");
  }
  const auto pd = pred.depths();
  const auto td = truth.depths();
  std::size_t common = 0, inside = 0;
  double abs_sum = 0.0;
  for (std::size_t t = 0; t < td.size(); ++t) {
    if (std::isnan(td[t]) || std::isnan(pd[t])) continue;
    ++common;
    const double err_ms = std::fabs(pd[t] - td[t]) * interval_ms;
    abs_sum += err_ms;
    if (err_ms <= window_ms) ++inside;
  }
  MetricRow row;
  row.window_ms = window_ms;
  if (truth.coverage() > 0) {
    row.coverage_pct = 100.0 * static_cast<double>(common) / static_cast<double>(truth.coverage());
  }
  if (common > 0) {
    row.mean_error_ms = abs_sum / static_cast<double>(common);
    row.window_pct = 100.0 * static_cast<double>(inside) / static_cast<double>(common);
  }
  return row;
}

std::optional<double> mean_depth_gap(const Horizon& a, const Horizon& b) {
  const auto ad = a.depths();
  const auto bd = b.depths();
  if (ad.size() != bd.size()) return std::nullopt;
  std::size_t common = 0;
  double sum = 0.0;
  for (std::size_t t = 0; t < ad.size(); ++t) {
    if (std::isnan(ad[t]) || std::isnan(bd[t])) continue;
    ++common;
    sum += std::fabs(ad[t] - bd[t]);
  }
  if (common == 0) return std::nullopt;
  return sum / static_cast<double>(common);
}

std::vector<HorizonMatch> match_horizons(const HorizonSet& pred, const HorizonSet& truth,
                                         double max_distance) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    for (std::size_t t = 0; t < truth.size(); ++t) {
      const auto gap = mean_depth_gap(pred.horizons[p], truth.horizons[t]);
      if (gap && *gap <= max_distance) candidates.emplace_back(*gap, p, t);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<bool> pred_used(pred.size()), truth_used(truth.size());
  std::vector<HorizonMatch> out;
  for (const auto& [gap, p, t] : candidates) {
    if (pred_used[p] || truth_used[t]) continue;
    pred_used[p] = truth_used[t] = true;
    out.push_back({p, t});
  }
  std::sort(out.begin(), out.end(),
            [](const HorizonMatch& a, const HorizonMatch& b) { return a.truth < b.truth; });
  return out;
}

}  // namespace hseg
