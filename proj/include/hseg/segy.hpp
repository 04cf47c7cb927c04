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
#include <span>
#include <vector>

#include "hseg/cube.hpp"

namespace hseg {

/// 1-based byte offsets of the 4-byte big-endian inline/crossline labels in
/// the 240-byte trace header.
struct SegyHeaderSpec {
  int inline_byte = 189;
  int crossline_byte = 193;
};

enum class SegySampleFormat : std::uint16_t { IbmFloat = 1, IeeeFloat = 5 };

float ibm_to_ieee(std::uint32_t ibm);
std::uint32_t ieee_to_ibm(float value);

/// Reads the rev-1 fixed-length subset: 3200-byte text header, 400-byte binary
/// header, then 240-byte trace headers each followed by 4-byte samples.
Cube decode_segy(std::span<const std::uint8_t> bytes,
                 const SegyHeaderSpec& spec = {});
Cube ingest_segy(const std::filesystem::path& path,
                 const SegyHeaderSpec& spec = {});

struct SegyTrace {
  std::int32_t inline_label = 0;
  std::int32_t crossline_label = 0;
  std::vector<float> samples;
};

/// Fixture writer. Each trace header carries its own sample count, so the
/// writer can also produce deliberately inconsistent files.
std::vector<std::uint8_t> encode_segy(std::span<const SegyTrace> traces,
                                      double sample_interval_ms,
                                      SegySampleFormat format,
                                      const SegyHeaderSpec& spec = {});

/// Writes every live trace of the cube, labelled from its origins.
void write_segy(const Cube& cube, const std::filesystem::path& path,
                SegySampleFormat format, const SegyHeaderSpec& spec = {});

}  // namespace hseg
