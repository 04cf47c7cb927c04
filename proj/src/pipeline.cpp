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

#include "hseg/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "hseg/error.hpp"
#include "hseg/mask.hpp"
#include "hseg/nn/denormals.hpp"
#include "hseg/nn/ops.hpp"
#include "hseg/nn/optim.hpp"

namespace hseg {
namespace {

constexpr std::uint64_t kCubeStream = 0xC0BEull;

// Extent along the channel axis, then the in-image spatial extent.
std::pair<std::size_t, std::size_t> split_extents(const Triple& shape, Axis axis) {
  return axis == Axis::Inline ? std::pair{shape[0], shape[1]} : std::pair{shape[1], shape[0]};
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (iterations < 1) throw ConfigError("train: iterations must be >= 1");
  if (!(base_lr > 0.0)) throw ConfigError("train: base_lr must be positive");
  if (!(lr_decay_rate >= 0.0)) throw ConfigError("train: lr_decay_rate must be nonnegative");
  if (thickness < 1 || thickness % 2 == 0) throw ConfigError("train: thickness must be odd");
  if (inline_stride < 1) throw ConfigError("train: inline_stride must be >= 1");
  if (!(dice_smooth > 0.0)) throw ConfigError("train: dice smooth must be positive");
  shape_policy.validate();
  augment.validate();
}

std::string format_log_line(std::size_t iteration, double lr, double loss) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu, %.6e, %.8f", iteration, lr, loss);
  return buf;
}

TrainedModel train(std::span<const TrainingCube> cubes, const TrainConfig& cfg,
                   const ModelConfig& model_cfg, const IterationLogger& logger) {
  cfg.validate();
  model_cfg.validate();
  if (cubes.empty()) throw ConfigError("train: no training cubes");

  ShapePolicy policy = cfg.shape_policy;
  if (policy.kind == ShapePolicy::Kind::Random) {
    policy.pinned_axis = cfg.channel_axis;
    policy.pinned_extent = model_cfg.input_channels;
    policy.multiple_of = std::max(policy.multiple_of, model_cfg.divisor());
  } else {
    const auto [channels, spatial] = split_extents(policy.fixed_shape, cfg.channel_axis);
    if (channels != model_cfg.input_channels) {
      throw ConfigError("train: crop has " + std::to_string(channels) + " " +
                        axis_name(cfg.channel_axis) + " slabs but the model expects " +
                        std::to_string(model_cfg.input_channels) + " input channels");
    }
    model_cfg.check_input(spatial, policy.fixed_shape[2]);
  }

  std::vector<std::vector<std::size_t>> splits;
  std::vector<double> weights;
  for (const auto& tc : cubes) {
    if (!tc.cube || !tc.horizons) throw ConfigError("train: cube '" + tc.alias + "' incomplete");
    if (tc.horizons->empty()) throw ConfigError("train: cube '" + tc.alias + "' has no horizons");
    splits.push_back(make_inline_split(tc.cube->geometry(), cfg.inline_stride));
    weights.push_back(cfg.cube_choice == CubeChoice::Uniform
                          ? 1.0
                          : static_cast<double>(shape_size(tc.cube->geometry().shape())));
  }

  Rng init_rng = derive_stream(cfg.seed, 0, 0x1417ull);
  TrainedModel trained = build_model(model_cfg, init_rng);
  trained.seed = cfg.seed;
  for (const auto& tc : cubes) trained.train_cubes.push_back(tc.alias);
  auto& model = trained.model;
  nn::AdamState<float> adam;
  const nn::ScopedFlushDenormals flush;

  for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
    const double lr = nn::lr_inverse_time(cfg.base_lr, iter, cfg.lr_decay_rate);
    Rng iter_rng = derive_stream(cfg.seed, iter + 1, kCubeStream);
    const std::size_t ci =
        std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(iter_rng);
    const auto& tc = cubes[ci];
    const auto& geometry = tc.cube->geometry();
    const Triple shape = sample_crop_shape(geometry, policy, iter_rng);

    std::vector<std::pair<NdArray<float>, NdArray<float>>> items;
    std::vector<CropWindow> windows;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      Rng item_rng = derive_stream(cfg.seed, iter + 1, b + 1);
      const CropWindow window = sample_window_origin(geometry, shape, splits[ci], item_rng);
      const NdArray<float> raw = cut_crop(*tc.cube, window);
      NdArray<float> values = cfg.scaling == Scaling::PerCrop
                                  ? scale_minmax(raw)
                                  : scale_with_range(raw, value_stats(*tc.cube));
      NdArray<float> mask;
      try {
        mask = rasterize_mask(*tc.horizons, window, cfg.thickness);
      } catch (const OverlapError& e) {
        throw OverlapError(e.first(), e.second(),
                           "in cube '" + tc.alias + "', window " + window.to_string());
      }
      auto [img, msk] = compose(to_channel_layout(values, cfg.channel_axis),
                                to_channel_layout(mask, cfg.channel_axis), cfg.augment, item_rng);
      items.emplace_back(from_channel_layout(img, cfg.channel_axis),
                         from_channel_layout(msk, cfg.channel_axis));
      windows.push_back(window);
    }
    const CropBatch batch = assemble_batch(items, cfg.channel_axis, std::move(windows));

    // The network predicts the central slab along the channel axis.
    const std::size_t n = batch.masks.dim(0), c = batch.masks.dim(1);
    const std::size_t h = batch.masks.dim(2), w = batch.masks.dim(3);
    NdArray<float> target({n, 1, h, w});
    for (std::size_t b = 0; b < n; ++b) {
      std::copy_n(batch.masks.raw() + batch.masks.offset(b, c / 2, 0, 0), h * w,
                  target.raw() + b * h * w);
    }

    nn::Tape<float> tape;
    const auto params = model.bind(tape, true);
    const auto input = tape.leaf(batch.values, false);
    const auto pred = model.forward(tape, input, params);
    const auto loss_var = nn::dice_loss(tape, pred, target, cfg.dice_smooth);
    const double loss = tape.value(loss_var)[0];
    if (!std::isfinite(loss)) {
      throw NumericError("train: non-finite loss at iteration " + std::to_string(iter));
    }
    tape.backward(loss_var);
    std::vector<NdArray<float>> grads;
    grads.reserve(params.size());
    for (const auto& p : params) grads.push_back(std::move(tape.grad(p)));
    nn::adam_step<float>(model.parameters(), grads, adam, lr);

    trained.loss_history.push_back(loss);
    if (logger) logger(iter, lr, loss);
  }
  return trained;
}

BatchPredictor as_predictor(const EncoderDecoder& model) {
  return [&model](const NdArray<float>& batch) { return model.predict(batch); };
}

std::vector<std::size_t> window_starts(std::size_t extent, std::size_t crop, std::size_t stride) {
  if (crop < 1 || crop > extent) {
    throw ConfigError("inference crop extent " + std::to_string(crop) + " does not fit extent " +
                      std::to_string(extent));
  }
  if (stride < 1 || stride > crop) {
    throw ConfigError("inference stride must lie in [1, crop extent]");
  }
  std::vector<std::size_t> starts;
  for (std::size_t s = 0;; s += stride) {
    if (s + crop >= extent) {
      starts.push_back(extent - crop);
      break;
    }
    starts.push_back(s);
  }
  return starts;
}

NdArray<float> predict_volume(const BatchPredictor& predictor, const Cube& cube,
                              const InferenceConfig& cfg) {
  const auto& g = cube.geometry();
  const Triple extent{g.n_inlines, g.n_crosslines, g.n_samples};
  std::array<std::vector<std::size_t>, 3> starts;
  for (int a = 0; a < 3; ++a) starts[a] = window_starts(extent[a], cfg.crop_shape[a], cfg.stride[a]);
  if (cfg.windows_per_batch < 1) throw ConfigError("inference: windows_per_batch must be >= 1");

  std::vector<CropWindow> windows;
  for (std::size_t i : starts[0]) {
    for (std::size_t j : starts[1]) {
      for (std::size_t k : starts[2]) windows.push_back({{i, j, k}, cfg.crop_shape});
    }
  }

  std::vector<double> sum(shape_size(g.shape()), 0.0);
  std::vector<std::uint32_t> hits(sum.size(), 0);
  const auto [slabs, spatial] = split_extents(cfg.crop_shape, cfg.channel_axis);
  const std::size_t depth = cfg.crop_shape[2];
  const std::optional<ValueRange> range =
      cfg.scaling == Scaling::CubeRange ? std::optional(value_stats(cube)) : std::nullopt;

  for (std::size_t first = 0; first < windows.size(); first += cfg.windows_per_batch) {
    const std::size_t count = std::min(cfg.windows_per_batch, windows.size() - first);
    NdArray<float> batch({count, slabs, spatial, depth});
    const std::size_t item = slabs * spatial * depth;
    for (std::size_t b = 0; b < count; ++b) {
      const NdArray<float> raw = cut_crop(cube, windows[first + b]);
      const NdArray<float> scaled = range ? scale_with_range(raw, *range) : scale_minmax(raw);
      const NdArray<float> image = to_channel_layout(scaled, cfg.channel_axis);
      std::copy(image.data().begin(), image.data().end(), batch.raw() + b * item);
    }
    const NdArray<float> out = predictor(batch);
    if (out.shape() != Shape{count, 1, spatial, depth}) {
      throw RangeError("predict_volume: predictor returned " + shape_to_string(out.shape()) +
                       ", expected " + shape_to_string({count, 1, spatial, depth}));
    }
    for (std::size_t b = 0; b < count; ++b) {
      const CropWindow& w = windows[first + b];
      for (std::size_t s = 0; s < slabs; ++s) {
        for (std::size_t p = 0; p < spatial; ++p) {
          const std::size_t il = w.origin[0] + (cfg.channel_axis == Axis::Inline ? s : p);
          const std::size_t xl = w.origin[1] + (cfg.channel_axis == Axis::Inline ? p : s);
          const std::size_t base = g.trace_index(il, xl) * g.n_samples + w.origin[2];
          const float* src = out.raw() + (b * spatial + p) * depth;
          for (std::size_t d = 0; d < depth; ++d) {
            sum[base + d] += static_cast<double>(src[d]);
            ++hits[base + d];
          }
        }
      }
    }
  }

  NdArray<float> volume(g.shape());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    volume[i] = static_cast<float>(sum[i] / static_cast<double>(hits[i]));
  }
  return volume;
}

}  // namespace hseg
