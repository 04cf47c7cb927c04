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
#include <utility>

#include "hseg/ndarray.hpp"
#include "hseg/rng.hpp"

namespace hseg {

/// Training-time distortion settings. Images are (C, H, W) arrays scaled to
/// [0, 1]; magnitudes are relative to that range or to image size.
struct AugmentConfig {
  double additive_std = 0.03;
  double multiplicative_low = 0.9;
  double multiplicative_high = 1.1;
  double rotate_max_deg = 15.0;
  double shift_max_frac = 0.1;
  double scale_low = 0.85;
  double scale_high = 1.15;
  double perspective_jitter_frac = 0.05;
  double elastic_alpha = 40.0;  // pixels
  double elastic_sigma = 6.0;   // pixels
  std::size_t cutout_count = 1;
  double cutout_frac = 0.1;
  double p_invert = 0.5;
  double p_noise = 0.5;
  double p_geometric = 0.5;
  double p_cutout = 0.5;

  void validate() const;
  /// Every gate closed.
  static AugmentConfig disabled();
};

/// Mirrors every value within the image's [min, max] range. Horizons are
/// picked on peaks and troughs alike, so labels should not depend on polarity.
NdArray<float> apply_inversion(const NdArray<float>& image);

/// image * m + a, m ~ U[multiplicative range], a ~ N(0, additive_std), per element.
NdArray<float> apply_noise(const NdArray<float>& image, const AugmentConfig& cfg, Rng& rng);

/// One concrete geometric distortion. Coordinates are (row, column) pixels.
struct GeometricParams {
  double angle_deg = 0.0;
  double scale = 1.0;
  double shift_row = 0.0;
  double shift_col = 0.0;
  /// Displacement of the corners (top-left, top-right, bottom-right,
  /// bottom-left), (row, column) each.
  std::array<std::array<double, 2>, 4> corner_jitter{};
  /// (H, W) displacement fields; empty means no elastic component.
  NdArray<double> elastic_row;
  NdArray<double> elastic_col;
};

GeometricParams sample_geometric(const AugmentConfig& cfg, std::size_t height,
                                 std::size_t width, Rng& rng);

/// Source (row, column) read by every output pixel; each array is (H, W).
std::pair<NdArray<double>, NdArray<double>> source_coordinates(const GeometricParams& params,
                                                               std::size_t height,
                                                               std::size_t width);

/// Applies one displacement to both arrays: bilinear for the image, nearest
/// then re-binarised for the mask. Outside samples become 0.
std::pair<NdArray<float>, NdArray<float>> warp(const NdArray<float>& image,
                                               const NdArray<float>& mask,
                                               const GeometricParams& params);

std::pair<NdArray<float>, NdArray<float>> apply_geometric(const NdArray<float>& image,
                                                          const NdArray<float>& mask,
                                                          const AugmentConfig& cfg, Rng& rng);

/// cutout_count rectangles of about cutout_frac * H * W cells, filled with
/// the image mean across all channels.
NdArray<float> apply_cutout(const NdArray<float>& image, const AugmentConfig& cfg, Rng& rng);

/// inversion -> noise -> geometric -> cutout, each behind its probability gate.
std::pair<NdArray<float>, NdArray<float>> compose(const NdArray<float>& image,
                                                  const NdArray<float>& mask,
                                                  const AugmentConfig& cfg, Rng& rng);

}  // namespace hseg
