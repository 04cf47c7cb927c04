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

#include <cstdint>
#include <vector>

#include "hseg/cube.hpp"
#include "hseg/horizon.hpp"

namespace hseg {

/// Layered-earth generator for desk-scale test cubes.
struct SyntheticSpec {
  CubeGeometry geometry;
  std::size_t n_layers = 4;          // n_layers - 1 interfaces
  double surface_smoothness = 12.0;  // correlation length of relief, in traces
  double relief = 6.0;               // peak vertical undulation, in samples
  std::size_t fault_count = 0;
  double fault_throw = 5.0;          // peak fault displacement, in samples
  double wavelet_peak_hz = 30.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticCube {
  Cube cube;
  HorizonSet horizons;               // one per interface, full coverage
  std::vector<double> reflectivity;  // per interface, top to bottom
};

/// Zero-phase Ricker pulse; time in seconds.
double ricker(double peak_hz, double t_seconds);

/// Throws ConfigError when interfaces end up closer than
/// kMinInterfaceSeparation samples or outside the depth range.
SyntheticCube synthesize_cube(const SyntheticSpec& spec);

inline constexpr double kMinInterfaceSeparation = 3.0;

}  // namespace hseg
