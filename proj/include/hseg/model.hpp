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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hseg/nn/ops.hpp"
#include "hseg/nn/optim.hpp"
#include "hseg/nn/tape.hpp"
#include "hseg/rng.hpp"

namespace hseg {

struct ModelConfig {
  std::size_t depth = 3;  // encoder stages
  std::size_t base_channels = 16;
  std::size_t input_channels = 1;
  bool skip_connections = true;

  void validate() const;
  /// Throws ConfigError unless both image extents are multiples of 2^depth.
  void check_input(std::size_t height, std::size_t width) const;
  std::size_t divisor() const { return std::size_t{1} << depth; }

  bool operator==(const ModelConfig&) const = default;
};

struct ParameterSpec {
  std::string name;
  Shape shape;
};

/// 2-D encoder-decoder producing one probability per input pixel.
///
/// Encoder: `depth` stride-2 3x3 convolutions with ReLU, channels
/// base, 2*base, 4*base, ... Decoder: per stage a 2x nearest upsample,
/// optional concatenation with the matching encoder activation (the raw
/// input for the last stage), and a 3x3 convolution with ReLU that halves the
/// stage's channel count. A 1x1 convolution and sigmoid produce the output.
class EncoderDecoder {
 public:
  EncoderDecoder() = default;
  /// Validates the parameter list against the config's manifest.
  EncoderDecoder(ModelConfig config, std::vector<nn::Parameter<float>> parameters);

  static std::vector<ParameterSpec> manifest(const ModelConfig& config);
  /// He-normal kernels, zero biases.
  static EncoderDecoder initialize(const ModelConfig& config, Rng& rng);

  const ModelConfig& config() const { return config_; }
  std::vector<nn::Parameter<float>>& parameters() { return parameters_; }
  const std::vector<nn::Parameter<float>>& parameters() const { return parameters_; }
  std::size_t parameter_count() const;

  /// Places every parameter on the tape, in manifest order.
  template <typename T>
  std::vector<nn::Var> bind(nn::Tape<T>& tape, bool requires_grad) const;

  /// (B, C, H, W) -> (B, 1, H, W) probabilities. `params` come from bind().
  template <typename T>
  nn::Var forward(nn::Tape<T>& tape, nn::Var input, std::span<const nn::Var> params) const;

  /// Inference without gradient tracking.
  NdArray<float> predict(const NdArray<float>& batch) const;

  bool operator==(const EncoderDecoder&) const = default;

 private:
  ModelConfig config_;
  std::vector<nn::Parameter<float>> parameters_;
};

/// A model with its training record.
struct TrainedModel {
  EncoderDecoder model;
  std::vector<double> loss_history;
  std::vector<std::string> train_cubes;
  std::uint64_t seed = 0;
};

TrainedModel build_model(const ModelConfig& config, Rng& rng);

/// Checkpoint layout (little-endian):
///   "HFW1" | u32 version | u32 depth, base_channels, input_channels |
///   u8 skip | u64 seed | u32 #aliases, (u32 len, bytes)* |
///   u32 #params, per param (u32 len, name bytes, u32 rank, u64 dims...) |
///   raw f32 parameter blocks in manifest order | u32 CRC32 of all preceding bytes.
std::vector<std::uint8_t> encode_checkpoint(const TrainedModel& model);
TrainedModel decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace hseg
