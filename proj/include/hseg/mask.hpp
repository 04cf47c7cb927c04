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

#include "hseg/horizon.hpp"
#include "hseg/ndarray.hpp"
#include "hseg/window.hpp"

namespace hseg {

/// Binary mask of the window's shape. Each covered trace marks the samples
/// within +-(thickness-1)/2 of round(depth), clipped to the window. Throws
/// OverlapError when two thickened horizons share a voxel.
NdArray<float> rasterize_mask(const HorizonSet& set, const CropWindow& window,
                              std::size_t thickness);

/// Convenience: the window spanning the whole geometry.
CropWindow full_window(const CubeGeometry& geometry);

}  // namespace hseg
