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

#include "hseg/mask.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "hseg/error.hpp"

namespace hseg {

bool CropWindow::fits(const CubeGeometry& g) const {
  const Triple extent{g.n_inlines, g.n_crosslines, g.n_samples};
  for (int a = 0; a < 3; ++a) {
    if (shape[a] < 1 || origin[a] + shape[a] > extent[a]) return false;
  }
  return true;
}

void CropWindow::check(const CubeGeometry& g) const {
  if (!fits(g)) {
    throw RangeError("crop window " + to_string() + " outside cube " +
                     shape_to_string(g.shape()));
  }
}

std::string CropWindow::to_string() const {
  return "origin (" + std::to_string(origin[0]) + ", " + std::to_string(origin[1]) + ", " +
         std::to_string(origin[2]) + ") shape (" + std::to_string(shape[0]) + ", " +
         std::to_string(shape[1]) + ", " + std::to_string(shape[2]) + ")";
}

CropWindow full_window(const CubeGeometry& g) {
  return {{0, 0, 0}, {g.n_inlines, g.n_crosslines, g.n_samples}};
}

NdArray<float> rasterize_mask(const HorizonSet& set, const CropWindow& window,
                              std::size_t thickness) {
  if (thickness < 1 || thickness % 2 == 0) {
    throw ConfigError("mask thickness must be odd and >= 1, got " + std::to_string(thickness));
  }
  const auto [nx, ny, nt] = window.shape;
  NdArray<float> mask({nx, ny, nt}, 0.0f);
  if (set.empty()) return mask;
  window.check(set.horizons.front().geometry());

  const long half = static_cast<long>(thickness / 2);
  const long t0 = static_cast<long>(window.origin[2]);
  const long t1 = t0 + static_cast<long>(nt);
  // owner + 1 per voxel; 0 means unclaimed.
  std::vector<std::uint16_t> owner(mask.size(), 0);
  for (std::size_t h = 0; h < set.size(); ++h) {
    const auto& horizon = set.horizons[h];
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const auto depth = horizon.find(window.origin[0] + i, window.origin[1] + j);
        if (!depth) continue;
        const long centre = std::lround(*depth);
        for (long s = std::max(centre - half, t0); s <= std::min(centre + half, t1 - 1); ++s) {
          const std::size_t off = mask.offset(i, j, static_cast<std::size_t>(s - t0));
          if (owner[off] != 0 && owner[off] != h + 1) {
            throw OverlapError(set.horizons[owner[off] - 1].name(), horizon.name(),
                               "at trace (" + std::to_string(window.origin[0] + i) + ", " +
                                   std::to_string(window.origin[1] + j) + ") sample " +
                                   std::to_string(s));
          }
          owner[off] = static_cast<std::uint16_t>(h + 1);
          mask[off] = 1.0f;
        }
      }
    }
  }
  return mask;
}

}  // namespace hseg
