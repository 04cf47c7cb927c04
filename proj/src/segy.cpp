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

#include "hseg/segy.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "binary_io.hpp"

namespace hseg {
namespace {

constexpr std::size_t kTextHeader = 3200;
constexpr std::size_t kBinaryHeader = 400;
constexpr std::size_t kTraceHeader = 240;

// Binary header fields, 1-based byte positions.
constexpr std::size_t kIntervalByte = 3217;
constexpr std::size_t kSampleCountByte = 3221;
constexpr std::size_t kFormatByte = 3225;
constexpr std::size_t kRevisionByte = 3501;

// Trace header fields, 1-based.
constexpr std::size_t kTraceSampleCountByte = 115;
constexpr std::size_t kTraceIntervalByte = 117;

void check_spec(const SegyHeaderSpec& spec) {
  const auto ok = [](int b) { return b >= 1 && b + 3 <= static_cast<int>(kTraceHeader); };
  if (!ok(spec.inline_byte) || !ok(spec.crossline_byte)) {
    throw ConfigError("SEG-Y header byte offsets must lie within the 240-byte trace header");
  }
}

void put_u16be(std::vector<std::uint8_t>& buf, std::size_t pos1, std::uint16_t v) {
  buf[pos1 - 1] = static_cast<std::uint8_t>(v >> 8);
  buf[pos1] = static_cast<std::uint8_t>(v);
}

void put_u32be(std::vector<std::uint8_t>& buf, std::size_t pos1, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    buf[pos1 - 1 + i] = static_cast<std::uint8_t>(v >> (8 * (3 - i)));
  }
}

}  // namespace

float ibm_to_ieee(std::uint32_t ibm) {
  const bool negative = (ibm >> 31) != 0;
  const int exponent = static_cast<int>((ibm >> 24) & 0x7f);
  const std::uint32_t fraction = ibm & 0x00ffffff;
  if (fraction == 0) return negative ? -0.0f : 0.0f;
  // value = fraction / 2^24 * 16^(exponent - 64)
  const double magnitude =
      std::ldexp(static_cast<double>(fraction), 4 * (exponent - 64) - 24);
  return static_cast<float>(negative ? -magnitude : magnitude);
}

std::uint32_t ieee_to_ibm(float value) {
  if (std::isnan(value) || std::isinf(value)) {
    throw RangeError("ieee_to_ibm: non-finite value");
  }
  const std::uint32_t sign = std::signbit(value) ? 0x80000000u : 0u;
  double magnitude = std::fabs(static_cast<double>(value));
  if (magnitude == 0.0) return sign;
  int binary_exp = 0;
  const double mantissa = std::frexp(magnitude, &binary_exp);  // [0.5, 1)
  int hex_exp = binary_exp >= 0 ? (binary_exp + 3) / 4 : -((-binary_exp) / 4);
  double fraction = std::ldexp(mantissa, binary_exp - 4 * hex_exp);  // [1/16, 1)
  auto bits = static_cast<std::uint64_t>(std::nearbyint(std::ldexp(fraction, 24)));
  if (bits >= (1u << 24)) {
    bits >>= 4;
    ++hex_exp;
  }
  const int biased = hex_exp + 64;
  if (biased > 127) throw RangeError("ieee_to_ibm: value exceeds IBM range");
  if (biased < 0) return sign;  // underflow to zero
  return sign | (static_cast<std::uint32_t>(biased) << 24) |
         static_cast<std::uint32_t>(bits);
}

Cube decode_segy(std::span<const std::uint8_t> bytes, const SegyHeaderSpec& spec) {
  check_spec(spec);
  if (bytes.size() < kTextHeader + kBinaryHeader) {
    throw FormatError("SEG-Y: truncated file (missing headers)");
  }
  const std::uint8_t* bin = bytes.data();
  const std::size_t ns = detail::load_u16be(bin + kSampleCountByte - 1);
  const std::uint16_t format_code = detail::load_u16be(bin + kFormatByte - 1);
  const std::uint16_t interval_us = detail::load_u16be(bin + kIntervalByte - 1);
  if (format_code != static_cast<std::uint16_t>(SegySampleFormat::IbmFloat) &&
      format_code != static_cast<std::uint16_t>(SegySampleFormat::IeeeFloat)) {
    throw FormatError("SEG-Y: unknown sample format code " + std::to_string(format_code));
  }
  if (ns == 0) throw FormatError("SEG-Y: binary header declares zero samples per trace");

  const std::size_t trace_bytes = kTraceHeader + 4 * ns;
  const std::size_t body = bytes.size() - kTextHeader - kBinaryHeader;
  if (body == 0) throw FormatError("SEG-Y: file contains zero traces");

  struct Parsed {
    std::int32_t il, xl;
    std::size_t offset;
  };
  std::vector<Parsed> parsed;
  std::size_t pos = kTextHeader + kBinaryHeader;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < kTraceHeader) {
      throw FormatError("SEG-Y: truncated file (partial trace header)");
    }
    const std::uint8_t* th = bytes.data() + pos;
    const std::size_t trace_ns = detail::load_u16be(th + kTraceSampleCountByte - 1);
    if (trace_ns != ns) {
      throw FormatError("SEG-Y: inconsistent trace length in trace " +
                        std::to_string(parsed.size()) + " (" + std::to_string(trace_ns) +
                        " samples, binary header says " + std::to_string(ns) + ")");
    }
    if (bytes.size() - pos < trace_bytes) {
      throw FormatError("SEG-Y: truncated file (partial trace " +
                        std::to_string(parsed.size()) + ")");
    }
    parsed.push_back({static_cast<std::int32_t>(detail::load_u32be(th + spec.inline_byte - 1)),
                      static_cast<std::int32_t>(detail::load_u32be(th + spec.crossline_byte - 1)),
                      pos + kTraceHeader});
    pos += trace_bytes;
  }

  std::int32_t il_min = std::numeric_limits<std::int32_t>::max(), il_max = std::numeric_limits<std::int32_t>::min();
  std::int32_t xl_min = il_min, xl_max = il_max;
  for (const auto& p : parsed) {
    il_min = std::min(il_min, p.il);
    il_max = std::max(il_max, p.il);
    xl_min = std::min(xl_min, p.xl);
    xl_max = std::max(xl_max, p.xl);
  }
  CubeGeometry g;
  g.n_inlines = static_cast<std::size_t>(static_cast<std::int64_t>(il_max) - il_min + 1);
  g.n_crosslines = static_cast<std::size_t>(static_cast<std::int64_t>(xl_max) - xl_min + 1);
  g.n_samples = ns;
  g.sample_interval_ms = interval_us > 0 ? interval_us / 1000.0 : 2.0;
  g.inline_origin = il_min;
  g.crossline_origin = xl_min;

  NdArray<float> values(g.shape());
  std::vector<std::uint8_t> presence(g.trace_count(), 0);
  const bool ibm = format_code == static_cast<std::uint16_t>(SegySampleFormat::IbmFloat);
  for (const auto& p : parsed) {
    const std::size_t il = static_cast<std::size_t>(p.il - il_min);
    const std::size_t xl = static_cast<std::size_t>(p.xl - xl_min);
    const std::size_t t = g.trace_index(il, xl);
    if (presence[t]) {
      throw FormatError("SEG-Y: duplicate trace for inline " + std::to_string(p.il) +
                        ", crossline " + std::to_string(p.xl));
    }
    presence[t] = 1;
    const std::uint8_t* src = bytes.data() + p.offset;
    for (std::size_t d = 0; d < ns; ++d) {
      const std::uint32_t word = detail::load_u32be(src + 4 * d);
      values(il, xl, d) = ibm ? ibm_to_ieee(word) : std::bit_cast<float>(word);
    }
  }
  return Cube(g, std::move(values), std::move(presence));
}

Cube ingest_segy(const std::filesystem::path& path, const SegyHeaderSpec& spec) {
  try {
    return decode_segy(detail::read_file(path), spec);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_segy(std::span<const SegyTrace> traces,
                                      double sample_interval_ms,
                                      SegySampleFormat format,
                                      const SegyHeaderSpec& spec) {
  check_spec(spec);
  const std::size_t ns = traces.empty() ? 0 : traces.front().samples.size();
  std::vector<std::uint8_t> out(kTextHeader + kBinaryHeader, 0);
  std::string text = "C 1 horizonseg fixture writer";
  text.resize(kTextHeader, ' ');
  std::copy(text.begin(), text.end(), out.begin());
  put_u16be(out, kIntervalByte,
            static_cast<std::uint16_t>(std::lround(sample_interval_ms * 1000.0)));
  put_u16be(out, kSampleCountByte, static_cast<std::uint16_t>(ns));
  put_u16be(out, kFormatByte, static_cast<std::uint16_t>(format));
  put_u16be(out, kRevisionByte, 0x0100);

  for (const auto& tr : traces) {
    std::vector<std::uint8_t> header(kTraceHeader, 0);
    put_u32be(header, static_cast<std::size_t>(spec.inline_byte),
              static_cast<std::uint32_t>(tr.inline_label));
    put_u32be(header, static_cast<std::size_t>(spec.crossline_byte),
              static_cast<std::uint32_t>(tr.crossline_label));
    put_u16be(header, kTraceSampleCountByte, static_cast<std::uint16_t>(tr.samples.size()));
    put_u16be(header, kTraceIntervalByte,
              static_cast<std::uint16_t>(std::lround(sample_interval_ms * 1000.0)));
    out.insert(out.end(), header.begin(), header.end());
    for (float v : tr.samples) {
      const std::uint32_t word = format == SegySampleFormat::IbmFloat
                                     ? ieee_to_ibm(v)
                                     : std::bit_cast<std::uint32_t>(v);
      for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(word >> (8 * i)));
    }
  }
  return out;
}

void write_segy(const Cube& cube, const std::filesystem::path& path,
                SegySampleFormat format, const SegyHeaderSpec& spec) {
  const auto& g = cube.geometry();
  std::vector<SegyTrace> traces;
  for (std::size_t il = 0; il < g.n_inlines; ++il) {
    for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
      if (!cube.is_live(il, xl)) continue;
      const auto tr = cube.trace(il, xl);
      traces.push_back({static_cast<std::int32_t>(g.inline_origin + static_cast<std::int64_t>(il)),
                        static_cast<std::int32_t>(g.crossline_origin + static_cast<std::int64_t>(xl)),
                        std::vector<float>(tr.begin(), tr.end())});
    }
  }
  detail::write_file(path, encode_segy(traces, g.sample_interval_ms, format, spec));
}

}  // namespace hseg
