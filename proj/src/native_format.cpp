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

#include "hseg/native_format.hpp"

#include <algorithm>
#include <string>

#include "binary_io.hpp"

namespace hseg {
namespace {

constexpr char kMagic[4] = {'H', 'F', 'C', '1'};

struct BlockRange {
  std::size_t il0, il1, xl0, xl1;
};

std::vector<BlockRange> block_ranges(const CubeGeometry& g, std::size_t edge) {
  std::vector<BlockRange> out;
  for (std::size_t il = 0; il < g.n_inlines; il += edge) {
    for (std::size_t xl = 0; xl < g.n_crosslines; xl += edge) {
      out.push_back({il, std::min(il + edge, g.n_inlines), xl,
                     std::min(xl + edge, g.n_crosslines)});
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_native(const Cube& cube) {
  const auto& g = cube.geometry();
  detail::ByteWriter w;
  w.text(std::string(kMagic, 4));
  w.u64le(kNativeFormatVersion);
  w.i64le(static_cast<std::int64_t>(g.n_inlines));
  w.i64le(static_cast<std::int64_t>(g.n_crosslines));
  w.i64le(static_cast<std::int64_t>(g.n_samples));
  w.f64le(g.sample_interval_ms);
  w.i64le(g.inline_origin);
  w.i64le(g.crossline_origin);
  w.i64le(static_cast<std::int64_t>(kNativeBlockEdge));

  std::vector<std::uint8_t> bitmap((g.trace_count() + 7) / 8, 0);
  for (std::size_t t = 0; t < g.trace_count(); ++t) {
    if (cube.presence()[t]) bitmap[t / 8] |= static_cast<std::uint8_t>(1u << (t % 8));
  }
  w.bytes(bitmap);

  const auto& v = cube.values();
  for (const auto& b : block_ranges(g, kNativeBlockEdge)) {
    const std::size_t start = w.size();
    for (std::size_t d = 0; d < g.n_samples; ++d) {
      for (std::size_t il = b.il0; il < b.il1; ++il) {
        for (std::size_t xl = b.xl0; xl < b.xl1; ++xl) w.f32le(v(il, xl, d));
      }
    }
    const auto& buf = w.buffer();
    w.u32le(detail::crc32_of(std::span(buf).subspan(start)));
  }
  return std::move(w.buffer());
}

Cube decode_native(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "native cube");
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw FormatError("native cube: bad magic (expected HFC1)");
  }
  const auto version = r.u64le();
  if (version != kNativeFormatVersion) {
    throw FormatError("native cube: unsupported format version " +
                      std::to_string(version) + " (this build reads " +
                      std::to_string(kNativeFormatVersion) + ")");
  }
  const auto count = [&](const char* what) {
    const auto v = r.i64le();
    if (v < 1) throw FormatError(std::string("native cube: invalid ") + what);
    return static_cast<std::size_t>(v);
  };
  CubeGeometry g;
  g.n_inlines = count("n_inlines");
  g.n_crosslines = count("n_crosslines");
  g.n_samples = count("n_samples");
  g.sample_interval_ms = r.f64le();
  g.inline_origin = r.i64le();
  g.crossline_origin = r.i64le();
  const std::size_t edge = count("block edge");
  if (!(g.sample_interval_ms > 0.0)) {
    throw FormatError("native cube: invalid sample interval");
  }

  const auto bitmap = r.take((g.trace_count() + 7) / 8);
  std::vector<std::uint8_t> presence(g.trace_count());
  for (std::size_t t = 0; t < g.trace_count(); ++t) {
    presence[t] = (bitmap[t / 8] >> (t % 8)) & 1u;
  }

  NdArray<float> values(g.shape());
  std::size_t index = 0;
  for (const auto& b : block_ranges(g, edge)) {
    const std::size_t n = (b.il1 - b.il0) * (b.xl1 - b.xl0) * g.n_samples;
    const auto block = r.take(n * 4);
    const auto stored = r.u32le();
    if (detail::crc32_of(block) != stored) {
      throw FormatError("native cube: checksum mismatch in block " +
                        std::to_string(index));
    }
    detail::ByteReader br(block, "native cube block");
    for (std::size_t d = 0; d < g.n_samples; ++d) {
      for (std::size_t il = b.il0; il < b.il1; ++il) {
        for (std::size_t xl = b.xl0; xl < b.xl1; ++xl) values(il, xl, d) = br.f32le();
      }
    }
    ++index;
  }
  if (r.remaining() != 0) throw FormatError("native cube: trailing bytes");
  return Cube(g, std::move(values), std::move(presence));
}

void save_native(const Cube& cube, const std::filesystem::path& path) {
  detail::write_file(path, encode_native(cube));
}

Cube load_native(const std::filesystem::path& path) {
  try {
    return decode_native(detail::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hseg
