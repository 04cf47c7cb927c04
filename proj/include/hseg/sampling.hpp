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
#include <span>
#include <utility>
#include <vector>

#include "hseg/cube.hpp"
#include "hseg/ndarray.hpp"
#include "hseg/rng.hpp"
#include "hseg/window.hpp"

namespace hseg {

/// How crop extents are chosen.
///
/// Fixed: every window has fixed_shape. Random: each spatial extent is drawn
/// uniformly from [ceil(low * extent), floor(high * extent)], restricted to
/// multiples of `multiple_of`; the depth extent stays depth_extent. A pinned
/// axis keeps pinned_extent instead of being drawn (the trainer pins the
/// channel axis so the network input width never changes).
struct ShapePolicy {
  enum class Kind { Fixed, Random };

  Kind kind = Kind::Fixed;
  Triple fixed_shape{1, 128, 128};
  double low = 0.1;
  double high = 0.5;
  std::size_t depth_extent = 128;
  std::size_t multiple_of = 1;
  std::optional<Axis> pinned_axis;
  std::size_t pinned_extent = 1;

  void validate() const;
};

/// Inline indices {0, stride, 2*stride, ...} below n_inlines.
std::vector<std::size_t> make_inline_split(const CubeGeometry& geometry, std::size_t stride);

/// Draws a window shape. Throws ConfigError if the policy cannot fit.
Triple sample_crop_shape(const CubeGeometry& geometry, const ShapePolicy& policy, Rng& rng);

/// Draws an origin for a given shape. With allowed_inlines, the window is
/// centred on a drawn allowed inline (clamped inside the cube); for a
/// one-inline window that is exactly the drawn inline.
CropWindow sample_window_origin(const CubeGeometry& geometry, const Triple& shape,
                                std::span<const std::size_t> allowed_inlines, Rng& rng);

CropWindow sample_crop_window(const CubeGeometry& geometry, const ShapePolicy& policy,
                              std::span<const std::size_t> allowed_inlines, Rng& rng);

/// Exact copy of the window's values, shape (N_x, N_y, N_t).
NdArray<float> cut_crop(const Cube& cube, const CropWindow& window);

/// (v - min) / (max - min); constant input maps to zeros.
NdArray<float> scale_minmax(const NdArray<float>& crop);
/// Scales with an externally supplied range (e.g. cube statistics), clamped
/// to [0, 1].
NdArray<float> scale_with_range(const NdArray<float>& crop, ValueRange range);

struct CropBatch {
  NdArray<float> values;  // (batch, channels, spatial, depth)
  NdArray<float> masks;   // same shape, {0, 1}
  Axis channel_axis = Axis::Inline;
  std::vector<CropWindow> windows;
};

/// Moves channel_axis to the channel dimension of an (N_x, N_y, N_t) crop.
NdArray<float> to_channel_layout(const NdArray<float>& crop, Axis channel_axis);
/// Inverse of to_channel_layout for a (C, S, D) image.
NdArray<float> from_channel_layout(const NdArray<float>& image, Axis channel_axis);

/// Stacks equally shaped (values, mask) crops into a batch.
CropBatch assemble_batch(std::span<const std::pair<NdArray<float>, NdArray<float>>> crops,
                         Axis channel_axis, std::vector<CropWindow> windows = {});

/// Item `index` of a 4-D batch tensor as a (C, H, W) array.
NdArray<float> batch_item(const NdArray<float>& batch, std::size_t index);

}  // namespace hseg
