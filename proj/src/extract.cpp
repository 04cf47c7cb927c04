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

#include "hseg/extract.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "hseg/error.hpp"

namespace hseg {

std::vector<Pick> trace_picks(std::span<const float> trace, double threshold) {
  std::vector<Pick> picks;
  std::size_t s = 0;
  while (s < trace.size()) {
    if (trace[s] < threshold) {
      ++s;
      continue;
    }
    double mass = 0.0, moment = 0.0;
    const std::size_t first = s;
    for (; s < trace.size() && trace[s] >= threshold; ++s) {
      mass += trace[s];
      moment += trace[s] * static_cast<double>(s);
    }
    picks.push_back({moment / mass, first, s - 1});
  }
  return picks;
}

HorizonSet extract_horizons(const NdArray<float>& prob, const CubeGeometry& geometry,
                            double threshold, std::size_t min_traces) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("extract_horizons: threshold must lie in (0, 1)");
  }
  if (prob.shape() != geometry.shape()) {
    throw RangeError("extract_horizons: volume " + shape_to_string(prob.shape()) +
                     " does not match geometry " + shape_to_string(geometry.shape()));
  }
  for (float p : prob.data()) {
    if (!(p >= 0.0f && p <= 1.0f)) {
      throw RangeError("extract_horizons: probability outside [0, 1]");
    }
  }

  const std::size_t traces = geometry.trace_count();
  const std::size_t ns = geometry.n_samples;
  std::vector<std::vector<Pick>> picks(traces);
  for (std::size_t t = 0; t < traces; ++t) {
    picks[t] = trace_picks(prob.data().subspan(t * ns, ns), threshold);
  }

  struct Surface {
    std::vector<std::pair<std::size_t, double>> points;  // (trace, depth)
    double mean = 0.0;
  };
  std::vector<std::vector<int>> label(traces);
  for (std::size_t t = 0; t < traces; ++t) label[t].assign(picks[t].size(), -1);

  std::vector<Surface> surfaces;
  // Marks which trace the current surface already occupies.
  std::vector<int> occupied(traces, -1);
  const long nil = static_cast<long>(geometry.n_inlines);
  const long nxl = static_cast<long>(geometry.n_crosslines);
  for (std::size_t seed = 0; seed < traces; ++seed) {
    for (std::size_t p = 0; p < picks[seed].size(); ++p) {
      if (label[seed][p] != -1) continue;
      const int id = static_cast<int>(surfaces.size());
      Surface surface;
      std::deque<std::pair<std::size_t, std::size_t>> queue{{seed, p}};
      label[seed][p] = id;
      occupied[seed] = id;
      while (!queue.empty()) {
        const auto [t, k] = queue.front();
        queue.pop_front();
        const double d = picks[t][k].depth;
        surface.points.emplace_back(t, d);
        const long il = static_cast<long>(t) / nxl, xl = static_cast<long>(t) % nxl;
        const long nbr[4][2] = {{il - 1, xl}, {il + 1, xl}, {il, xl - 1}, {il, xl + 1}};
        for (const auto& n : nbr) {
          if (n[0] < 0 || n[0] >= nil || n[1] < 0 || n[1] >= nxl) continue;
          const auto nt = static_cast<std::size_t>(n[0] * nxl + n[1]);
          if (occupied[nt] == id) continue;
          // Closest unassigned pick within tolerance.
          std::size_t best = picks[nt].size();
          double best_gap = std::numeric_limits<double>::infinity();
          for (std::size_t q = 0; q < picks[nt].size(); ++q) {
            if (label[nt][q] != -1) continue;
            const double gap = std::fabs(picks[nt][q].depth - d);
            if (gap <= kNeighbourTolerance && gap < best_gap) {
              best = q;
              best_gap = gap;
            }
          }
          if (best == picks[nt].size()) continue;
          label[nt][best] = id;
          occupied[nt] = id;
          queue.emplace_back(nt, best);
        }
      }
      double sum = 0.0;
      for (const auto& [t, d] : surface.points) sum += d;
      surface.mean = sum / static_cast<double>(surface.points.size());
      surfaces.push_back(std::move(surface));
    }
  }

  std::vector<const Surface*> kept;
  for (const auto& s : surfaces) {
    if (s.points.size() >= std::max<std::size_t>(min_traces, 1)) kept.push_back(&s);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Surface* a, const Surface* b) { return a->mean < b->mean; });

  HorizonSet out;
  out.source = HorizonSource::Predicted;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    Horizon h(geometry, "P" + std::to_string(i + 1));
    for (const auto& [t, d] : kept[i]->points) {
      h.set(t / geometry.n_crosslines, t % geometry.n_crosslines, d);
    }
    out.horizons.push_back(std::move(h));
  }
  return out;
}

}  // namespace hseg
