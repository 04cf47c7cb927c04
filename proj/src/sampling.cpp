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

#include "hseg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hseg/error.hpp"

namespace hseg {

void ShapePolicy::validate() const {
  if (kind == Kind::Fixed) {
    if (fixed_shape[0] < 1 || fixed_shape[1] < 1 || fixed_shape[2] < 1) {
      throw ConfigError("shape policy: fixed extents must be >= 1");
    }
    return;
  }
  if (!(low > 0.0 && low <= high && high <= 1.0)) {
    throw ConfigError("shape policy: fraction range must satisfy 0 < low <= high <= 1");
  }
  if (depth_extent < 1 || multiple_of < 1 || pinned_extent < 1) {
    throw ConfigError("shape policy: extents must be >= 1");
  }
}

std::vector<std::size_t> make_inline_split(const CubeGeometry& geometry, std::size_t stride) {
  if (stride < 1) throw ConfigError("inline split stride must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < geometry.n_inlines; i += stride) out.push_back(i);
  return out;
}

Triple sample_crop_shape(const CubeGeometry& g, const ShapePolicy& policy, Rng& rng) {
  policy.validate();
  const Triple extent{g.n_inlines, g.n_crosslines, g.n_samples};
  if (policy.kind == ShapePolicy::Kind::Fixed) {
    for (int a = 0; a < 3; ++a) {
      if (policy.fixed_shape[a] > extent[a]) {
        throw ConfigError("shape policy: fixed shape (" + std::to_string(policy.fixed_shape[0]) +
                          ", " + std::to_string(policy.fixed_shape[1]) + ", " +
                          std::to_string(policy.fixed_shape[2]) + ") exceeds cube " +
                          shape_to_string(g.shape()));
      }
    }
    return policy.fixed_shape;
  }
  if (policy.depth_extent > g.n_samples) {
    throw ConfigError("shape policy: depth_extent " + std::to_string(policy.depth_extent) +
                      " exceeds n_samples " + std::to_string(g.n_samples));
  }
  Triple shape{0, 0, policy.depth_extent};
  for (int a = 0; a < 2; ++a) {
    const Axis axis = a == 0 ? Axis::Inline : Axis::Crossline;
    if (policy.pinned_axis && *policy.pinned_axis == axis) {
      if (policy.pinned_extent > extent[a]) {
        throw ConfigError(std::string("shape policy: pinned ") + axis_name(axis) +
                          " extent exceeds cube");
      }
      shape[a] = policy.pinned_extent;
      continue;
    }
    const auto lo = static_cast<std::size_t>(std::ceil(policy.low * static_cast<double>(extent[a])));
    const auto hi = static_cast<std::size_t>(std::floor(policy.high * static_cast<double>(extent[a])));
    const std::size_t m = policy.multiple_of;
    const std::size_t first = std::max<std::size_t>((std::max<std::size_t>(lo, 1) + m - 1) / m, 1);
    const std::size_t last = hi / m;
    if (first > last) {
      throw ConfigError(std::string("shape policy: no admissible ") + axis_name(axis) +
                        " extent in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    shape[a] = m * std::uniform_int_distribution<std::size_t>(first, last)(rng);
  }
  return shape;
}

CropWindow sample_window_origin(const CubeGeometry& g, const Triple& shape,
                                std::span<const std::size_t> allowed_inlines, Rng& rng) {
  const Triple extent{g.n_inlines, g.n_crosslines, g.n_samples};
  CropWindow w;
  w.shape = shape;
  for (int a = 0; a < 3; ++a) {
    if (shape[a] < 1 || shape[a] > extent[a]) {
      throw ConfigError("crop shape does not fit cube " + shape_to_string(g.shape()));
    }
  }
  if (!allowed_inlines.empty()) {
    const std::size_t pick = allowed_inlines[std::uniform_int_distribution<std::size_t>(
        0, allowed_inlines.size() - 1)(rng)];
    if (pick >= g.n_inlines) throw RangeError("allowed inline outside cube");
    const std::size_t half = shape[0] / 2;
    w.origin[0] = std::min(pick >= half ? pick - half : 0, extent[0] - shape[0]);
  } else {
    w.origin[0] = std::uniform_int_distribution<std::size_t>(0, extent[0] - shape[0])(rng);
  }
  for (int a = 1; a < 3; ++a) {
    w.origin[a] = std::uniform_int_distribution<std::size_t>(0, extent[a] - shape[a])(rng);
  }
  return w;
}

CropWindow sample_crop_window(const CubeGeometry& g, const ShapePolicy& policy,
                              std::span<const std::size_t> allowed_inlines, Rng& rng) {
  const Triple shape = sample_crop_shape(g, policy, rng);
  return sample_window_origin(g, shape, allowed_inlines, rng);
}

NdArray<float> cut_crop(const Cube& cube, const CropWindow& window) {
  const auto& g = cube.geometry();
  window.check(g);
  const auto [nx, ny, nt] = window.shape;
  NdArray<float> out({nx, ny, nt});
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const auto tr = cube.trace(window.origin[0] + i, window.origin[1] + j);
      std::copy_n(tr.begin() + static_cast<std::ptrdiff_t>(window.origin[2]), nt,
                  out.raw() + out.offset(i, j, 0));
    }
  }
  return out;
}

NdArray<float> scale_minmax(const NdArray<float>& crop) {
  NdArray<float> out(crop.shape(), 0.0f);
  if (crop.empty()) return out;
  const auto [lo, hi] = std::minmax_element(crop.data().begin(), crop.data().end());
  const float min = *lo, max = *hi;
  if (!(max > min)) return out;
  const float span = max - min;
  for (std::size_t i = 0; i < crop.size(); ++i) {
    out[i] = std::clamp((crop[i] - min) / span, 0.0f, 1.0f);
  }
  return out;
}

NdArray<float> scale_with_range(const NdArray<float>& crop, ValueRange range) {
  NdArray<float> out(crop.shape(), 0.0f);
  if (!(range.max > range.min)) return out;
  const float span = range.max - range.min;
  for (std::size_t i = 0; i < crop.size(); ++i) {
    out[i] = std::clamp((crop[i] - range.min) / span, 0.0f, 1.0f);
  }
  return out;
}

NdArray<float> to_channel_layout(const NdArray<float>& crop, Axis channel_axis) {
  if (crop.rank() != 3) throw RangeError("to_channel_layout: expected a 3-D crop");
  if (channel_axis == Axis::Inline) return crop;
  const std::size_t nx = crop.dim(0), ny = crop.dim(1), nt = crop.dim(2);
  NdArray<float> out({ny, nx, nt});
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      std::copy_n(crop.raw() + crop.offset(i, j, 0), nt, out.raw() + out.offset(j, i, 0));
    }
  }
  return out;
}

NdArray<float> from_channel_layout(const NdArray<float>& image, Axis channel_axis) {
  // The permutation swaps the two leading axes, so it is its own inverse.
  return to_channel_layout(image, channel_axis);
}

CropBatch assemble_batch(std::span<const std::pair<NdArray<float>, NdArray<float>>> crops,
                         Axis channel_axis, std::vector<CropWindow> windows) {
  if (crops.empty()) throw RangeError("assemble_batch: no crops");
  const Shape& shape = crops.front().first.shape();
  for (const auto& [values, mask] : crops) {
    if (values.shape() != shape || mask.shape() != shape) {
      throw RangeError("assemble_batch: heterogeneous crop shapes " + shape_to_string(shape) +
                       " vs " + shape_to_string(values.shape()) + "/" +
                       shape_to_string(mask.shape()));
    }
  }
  if (shape.size() != 3) throw RangeError("assemble_batch: crops must be 3-D");
  const auto first = to_channel_layout(crops.front().first, channel_axis);
  const Shape item = first.shape();
  const std::size_t n = shape_size(item);
  Shape batch_shape{crops.size(), item[0], item[1], item[2]};
  CropBatch batch{NdArray<float>(batch_shape), NdArray<float>(batch_shape), channel_axis,
                  std::move(windows)};
  for (std::size_t b = 0; b < crops.size(); ++b) {
    const auto v = to_channel_layout(crops[b].first, channel_axis);
    const auto m = to_channel_layout(crops[b].second, channel_axis);
    std::copy(v.data().begin(), v.data().end(), batch.values.raw() + b * n);
    std::copy(m.data().begin(), m.data().end(), batch.masks.raw() + b * n);
  }
  return batch;
}

NdArray<float> batch_item(const NdArray<float>& batch, std::size_t index) {
  if (batch.rank() != 4 || index >= batch.dim(0)) {
    throw RangeError("batch_item: index outside batch");
  }
  const Shape item{batch.dim(1), batch.dim(2), batch.dim(3)};
  const std::size_t n = shape_size(item);
  std::vector<float> data(batch.raw() + index * n, batch.raw() + (index + 1) * n);
  return NdArray<float>(item, std::move(data));
}

}  // namespace hseg
