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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <unistd.h>

#include "hseg/cube.hpp"
#include "hseg/horizon.hpp"
#include "hseg/rng.hpp"

namespace hseg::testing {

/// Cube whose values enumerate 0, 1, 2, ... in (inline, crossline, depth) order.
inline Cube enumeration_cube(std::size_t ni, std::size_t nx, std::size_t ns,
                             std::vector<std::uint8_t> presence = {}) {
  CubeGeometry g{ni, nx, ns, 2.0, 0, 0};
  NdArray<float> v(g.shape());
  std::iota(v.raw(), v.raw() + v.size(), 0.0f);
  return Cube(g, std::move(v), std::move(presence));
}

inline Cube random_cube(const CubeGeometry& g, Rng& rng, double dead_fraction = 0.0) {
  NdArray<float> v(g.shape());
  for (auto& x : v.storage()) x = static_cast<float>(normal(rng, 0.0, 10.0));
  std::vector<std::uint8_t> presence(g.trace_count(), 1);
  for (auto& p : presence) p = uniform(rng, 0.0, 1.0) >= dead_fraction ? 1 : 0;
  presence[0] = 1;
  return Cube(g, std::move(v), std::move(presence));
}

/// Smooth random surfaces separated by at least `min_gap` samples after
/// rounding, plus optional random holes. `max_dip` bounds the depth change
/// between neighbouring traces.
inline HorizonSet random_horizons(const CubeGeometry& g, std::size_t count, Rng& rng,
                                  double min_gap = 4.0, double hole_fraction = 0.0,
                                  double max_dip = std::numeric_limits<double>::infinity()) {
  HorizonSet set;
  const double slot = static_cast<double>(g.n_samples) / static_cast<double>(count + 1);
  const double amp = std::max(0.0, (slot - min_gap) / 2.0 - 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    Horizon h(g, "H" + std::to_string(k + 1));
    const double base = slot * static_cast<double>(k + 1);
    const double a = uniform(rng, 0.0, amp);
    double fi = uniform(rng, 0.05, 0.3), fx = uniform(rng, 0.05, 0.3);
    const double ph = uniform(rng, 0.0, 6.28);
    if (a * std::max(fi, fx) > max_dip) {
      fi = std::min(fi, max_dip / a);
      fx = std::min(fx, max_dip / a);
    }
    for (std::size_t il = 0; il < g.n_inlines; ++il) {
      for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
        if (hole_fraction > 0.0 && uniform(rng, 0.0, 1.0) < hole_fraction) continue;
        const double d = base + a * std::sin(fi * static_cast<double>(il) +
                                             fx * static_cast<double>(xl) + ph);
        h.set(il, xl, d);
      }
    }
    if (h.coverage() == 0) h.set(0, 0, base);
    set.horizons.push_back(std::move(h));
  }
  return set;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hseg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace hseg::testing
