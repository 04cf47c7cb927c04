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
#include <filesystem>
#include <vector>

#include "hseg/cube.hpp"

namespace hseg {

inline constexpr std::uint64_t kNativeFormatVersion = 1;
inline constexpr std::size_t kNativeBlockEdge = 64;

/// Blocked little-endian cube container:
///   "HFC1" | u64 version | i64 n_inlines, n_crosslines, n_samples |
///   f64 sample_interval_ms | i64 inline_origin, crossline_origin |
///   i64 block_edge | presence bitmap (LSB-first, trace-major) |
///   per 64x64-trace block: depth-major f32 values, then u32 CRC32.
std::vector<std::uint8_t> encode_native(const Cube& cube);
Cube decode_native(std::span<const std::uint8_t> bytes);

void save_native(const Cube& cube, const std::filesystem::path& path);
Cube load_native(const std::filesystem::path& path);

}  // namespace hseg
