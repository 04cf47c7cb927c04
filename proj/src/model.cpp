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

#include "hseg/model.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "hseg/error.hpp"
#include "hseg/nn/denormals.hpp"

namespace hseg {
namespace {

constexpr char kMagic[4] = {'H', 'F', 'W', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

std::size_t stage_channels(const ModelConfig& c, std::size_t stage) {
  return c.base_channels << (stage - 1);  // stage is 1-based
}

std::size_t decoder_out(const ModelConfig& c, std::size_t stage) {
  return std::max<std::size_t>(stage_channels(c, stage) / 2, 1);
}

}  // namespace

void ModelConfig::validate() const {
  if (depth < 1 || depth > 8) throw ConfigError("model depth must lie in [1, 8]");
  if (base_channels < 1) throw ConfigError("model base_channels must be >= 1");
  if (input_channels < 1) throw ConfigError("model input_channels must be >= 1");
}

void ModelConfig::check_input(std::size_t height, std::size_t width) const {
  const std::size_t d = divisor();
  if (height == 0 || width == 0 || height % d != 0 || width % d != 0) {
    throw ConfigError("model input extent " + std::to_string(height) + "x" +
                      std::to_string(width) + " is not divisible by 2^" + std::to_string(depth) +
                      " = " + std::to_string(d));
  }
}

std::vector<ParameterSpec> EncoderDecoder::manifest(const ModelConfig& c) {
  c.validate();
  std::vector<ParameterSpec> out;
  std::size_t in = c.input_channels;
  for (std::size_t s = 1; s <= c.depth; ++s) {
    const std::size_t f = stage_channels(c, s);
    out.push_back({"enc" + std::to_string(s) + ".weight", {f, in, 3, 3}});
    out.push_back({"enc" + std::to_string(s) + ".bias", {f}});
    in = f;
  }
  for (std::size_t s = c.depth; s >= 1; --s) {
    std::size_t cin = in;
    if (c.skip_connections) cin += s > 1 ? stage_channels(c, s - 1) : c.input_channels;
    const std::size_t f = decoder_out(c, s);
    out.push_back({"dec" + std::to_string(s) + ".weight", {f, cin, 3, 3}});
    out.push_back({"dec" + std::to_string(s) + ".bias", {f}});
    in = f;
  }
  out.push_back({"head.weight", {1, in, 1, 1}});
  out.push_back({"head.bias", {1}});
  return out;
}

EncoderDecoder::EncoderDecoder(ModelConfig config, std::vector<nn::Parameter<float>> parameters)
    : config_(config), parameters_(std::move(parameters)) {
  const auto specs = manifest(config_);
  if (specs.size() != parameters_.size()) {
    throw FormatError("model: expected " + std::to_string(specs.size()) + " parameters, got " +
                      std::to_string(parameters_.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].name != parameters_[i].name || specs[i].shape != parameters_[i].value.shape()) {
      throw FormatError("model: parameter " + std::to_string(i) + " is '" + parameters_[i].name +
                        "' " + shape_to_string(parameters_[i].value.shape()) + ", expected '" +
                        specs[i].name + "' " + shape_to_string(specs[i].shape));
    }
  }
}

EncoderDecoder EncoderDecoder::initialize(const ModelConfig& config, Rng& rng) {
  std::vector<nn::Parameter<float>> params;
  for (const auto& spec : manifest(config)) {
    NdArray<float> value(spec.shape, 0.0f);
    if (spec.shape.size() == 4) {
      const double fan_in = static_cast<double>(spec.shape[1] * spec.shape[2] * spec.shape[3]);
      std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
      for (auto& v : value.data()) v = static_cast<float>(dist(rng));
    }
    params.push_back({spec.name, std::move(value)});
  }
  return EncoderDecoder(config, std::move(params));
}

std::size_t EncoderDecoder::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters_) n += p.value.size();
  return n;
}

template <typename T>
std::vector<nn::Var> EncoderDecoder::bind(nn::Tape<T>& tape, bool requires_grad) const {
  std::vector<nn::Var> vars;
  vars.reserve(parameters_.size());
  for (const auto& p : parameters_) vars.push_back(tape.leaf(cast_array<T>(p.value), requires_grad));
  return vars;
}

template <typename T>
nn::Var EncoderDecoder::forward(nn::Tape<T>& tape, nn::Var input,
                                std::span<const nn::Var> params) const {
  const auto& x = tape.value(input);
  if (x.rank() != 4) throw RangeError("model: input must be (B, C, H, W)");
  if (x.dim(1) != config_.input_channels) {
    throw RangeError("model: input has " + std::to_string(x.dim(1)) + " channels, model expects " +
                     std::to_string(config_.input_channels));
  }
  config_.check_input(x.dim(2), x.dim(3));
  if (params.size() != parameters_.size()) throw RangeError("model: parameter binding mismatch");

  std::size_t p = 0;
  std::vector<nn::Var> skips{input};
  nn::Var h = input;
  for (std::size_t s = 1; s <= config_.depth; ++s, p += 2) {
    h = nn::relu(tape, nn::conv2d(tape, h, params[p], params[p + 1], 2, 1));
    skips.push_back(h);
  }
  for (std::size_t s = config_.depth; s >= 1; --s, p += 2) {
    h = nn::upsample2x(tape, h);
    if (config_.skip_connections) h = nn::concat_channels(tape, h, skips[s - 1]);
    h = nn::relu(tape, nn::conv2d(tape, h, params[p], params[p + 1], 1, 1));
  }
  return nn::sigmoid(tape, nn::conv2d(tape, h, params[p], params[p + 1], 1, 0));
}

NdArray<float> EncoderDecoder::predict(const NdArray<float>& batch) const {
  const nn::ScopedFlushDenormals flush;
  nn::Tape<float> tape;
  const auto params = bind(tape, false);
  const auto in = tape.leaf(batch, false);
  return tape.value(forward(tape, in, params));
}

template std::vector<nn::Var> EncoderDecoder::bind<float>(nn::Tape<float>&, bool) const;
template std::vector<nn::Var> EncoderDecoder::bind<double>(nn::Tape<double>&, bool) const;
template nn::Var EncoderDecoder::forward<float>(nn::Tape<float>&, nn::Var,
                                                std::span<const nn::Var>) const;
template nn::Var EncoderDecoder::forward<double>(nn::Tape<double>&, nn::Var,
                                                 std::span<const nn::Var>) const;

TrainedModel build_model(const ModelConfig& config, Rng& rng) {
  return TrainedModel{EncoderDecoder::initialize(config, rng), {}, {}, 0};
}

std::vector<std::uint8_t> encode_checkpoint(const TrainedModel& trained) {
  const auto& c = trained.model.config();
  detail::ByteWriter w;
  w.text(std::string(kMagic, 4));
  w.u32le(kCheckpointVersion);
  w.u32le(static_cast<std::uint32_t>(c.depth));
  w.u32le(static_cast<std::uint32_t>(c.base_channels));
  w.u32le(static_cast<std::uint32_t>(c.input_channels));
  w.u8(c.skip_connections ? 1 : 0);
  w.u64le(trained.seed);
  w.u32le(static_cast<std::uint32_t>(trained.train_cubes.size()));
  for (const auto& alias : trained.train_cubes) {
    w.u32le(static_cast<std::uint32_t>(alias.size()));
    w.text(alias);
  }
  const auto& params = trained.model.parameters();
  w.u32le(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.u32le(static_cast<std::uint32_t>(p.name.size()));
    w.text(p.name);
    w.u32le(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.u64le(d);
  }
  for (const auto& p : params) {
    for (float v : p.value.data()) w.f32le(v);
  }
  w.u32le(detail::crc32_of(w.buffer()));
  return std::move(w.buffer());
}

TrainedModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw FormatError("checkpoint: truncated file");
  const auto body = bytes.first(bytes.size() - 4);
  detail::ByteReader tail(bytes.last(4), "checkpoint");
  if (!std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw FormatError("checkpoint: bad magic (expected HFW1)");
  }
  if (detail::crc32_of(body) != tail.u32le()) throw FormatError("checkpoint: CRC32 mismatch");

  detail::ByteReader r(body, "checkpoint");
  r.take(4);
  if (const auto v = r.u32le(); v != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(v));
  }
  ModelConfig c;
  c.depth = r.u32le();
  c.base_channels = r.u32le();
  c.input_channels = r.u32le();
  c.skip_connections = r.u8() != 0;
  TrainedModel out;
  out.seed = r.u64le();
  const auto n_alias = r.u32le();
  for (std::uint32_t i = 0; i < n_alias; ++i) {
    const auto len = r.u32le();
    const auto b = r.take(len);
    out.train_cubes.emplace_back(b.begin(), b.end());
  }
  const auto n_params = r.u32le();
  std::vector<ParameterSpec> specs;
  for (std::uint32_t i = 0; i < n_params; ++i) {
    const auto len = r.u32le();
    const auto b = r.take(len);
    ParameterSpec spec{std::string(b.begin(), b.end()), {}};
    const auto rank = r.u32le();
    if (rank > 8) throw FormatError("checkpoint: implausible parameter rank");
    for (std::uint32_t d = 0; d < rank; ++d) spec.shape.push_back(r.u64le());
    specs.push_back(std::move(spec));
  }
  std::vector<nn::Parameter<float>> params;
  for (auto& spec : specs) {
    NdArray<float> value(spec.shape);
    if (value.size() * 4 > r.remaining()) throw FormatError("checkpoint: truncated parameter block");
    for (auto& v : value.data()) v = r.f32le();
    params.push_back({std::move(spec.name), std::move(value)});
  }
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes");
  out.model = EncoderDecoder(c, std::move(params));
  return out;
}

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
  detail::write_file(path, encode_checkpoint(model));
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(detail::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace hseg
