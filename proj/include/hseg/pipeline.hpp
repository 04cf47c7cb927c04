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
#include <functional>
#include <span>
#include <string>

#include "hseg/augment.hpp"
#include "hseg/cube.hpp"
#include "hseg/horizon.hpp"
#include "hseg/model.hpp"
#include "hseg/sampling.hpp"

namespace hseg {

enum class Scaling { PerCrop, CubeRange };
enum class CubeChoice { Uniform, VolumeWeighted };

struct TrainConfig {
  std::size_t batch_size = 64;
  std::size_t iterations = 1000;
  double base_lr = 1e-3;
  double lr_decay_rate = 0.002;
  std::uint64_t seed = 0;
  ShapePolicy shape_policy;
  AugmentConfig augment;
  std::size_t thickness = 3;
  Axis channel_axis = Axis::Inline;
  /// Train windows are anchored on every inline_stride-th inline.
  std::size_t inline_stride = 1;
  Scaling scaling = Scaling::PerCrop;
  CubeChoice cube_choice = CubeChoice::Uniform;
  double dice_smooth = 1.0;

  void validate() const;
};

struct TrainingCube {
  std::string alias;
  const Cube* cube = nullptr;
  const HorizonSet* horizons = nullptr;
};

using IterationLogger = std::function<void(std::size_t iteration, double lr, double loss)>;

/// "iter, lr, loss" log line (no newline).
std::string format_log_line(std::size_t iteration, double lr, double loss);

/// Adam on Dice loss over random augmented crops. Deterministic in cfg.seed.
TrainedModel train(std::span<const TrainingCube> cubes, const TrainConfig& cfg,
                   const ModelConfig& model_cfg, const IterationLogger& logger = {});

/// (B, C, H, W) -> (B, 1, H, W) probabilities.
using BatchPredictor = std::function<NdArray<float>(const NdArray<float>&)>;

BatchPredictor as_predictor(const EncoderDecoder& model);

struct InferenceConfig {
  Triple crop_shape{1, 128, 128};
  Triple stride{1, 64, 64};
  Axis channel_axis = Axis::Inline;
  Scaling scaling = Scaling::PerCrop;
  std::size_t windows_per_batch = 16;
};

/// Window start offsets along one axis: multiples of stride, the last one
/// clamped so the window ends at the boundary.
std::vector<std::size_t> window_starts(std::size_t extent, std::size_t crop, std::size_t stride);

/// Sliding-window inference. Every voxel is the arithmetic mean of the
/// predictions of all windows covering it; a prediction for a multi-slab
/// window applies to every slab along the channel axis.
NdArray<float> predict_volume(const BatchPredictor& predictor, const Cube& cube,
                              const InferenceConfig& cfg);

}  // namespace hseg
