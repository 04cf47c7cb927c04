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

#include <cmath>
#include <string>
#include <vector>

#include "hseg/nn/gradcheck.hpp"
#include "hseg/nn/ops.hpp"
#include "hseg/rng.hpp"

namespace hseg::testing {

struct GradCase {
  std::string name;
  nn::GradCheckReport report;
  double tolerance = 1e-3;
};

inline NdArray<double> random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  NdArray<double> t(std::move(shape));
  for (auto& v : t.storage()) v = uniform(rng, lo, hi);
  return t;
}

/// Values bounded away from zero so ReLU kinks sit outside the difference stencil.
inline NdArray<double> kink_free_tensor(Rng& rng, Shape shape) {
  NdArray<double> t(std::move(shape));
  for (auto& v : t.storage()) {
    const double m = uniform(rng, 0.05, 1.0);
    v = uniform(rng, 0.0, 1.0) < 0.5 ? -m : m;
  }
  return t;
}

/// Scalar probe: sum(op(x) * R) for a fixed random R, so every output element
/// contributes with a distinct weight.
inline nn::Var project(nn::Tape<double>& tape, nn::Var y, const NdArray<double>& weights) {
  const nn::Var w = tape.leaf(weights, false);
  return nn::sum(tape, nn::mul(tape, y, w));
}

/// One randomized gradient check per differentiable operator plus the
/// conv -> relu -> conv -> dice composite. Shapes and hyperparameters are
/// drawn from the seed.
inline std::vector<GradCase> run_gradient_suite(std::uint64_t seed) {
  Rng rng = derive_stream(seed, 0x6ad);
  std::vector<GradCase> out;
  auto pick = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  {  // conv2d: input, kernels and bias
    const std::size_t b = pick(1, 2), c = pick(1, 3), f = pick(1, 3);
    const std::size_t k = 2 * pick(0, 1) + 1, stride = pick(1, 2), pad = pick(0, k / 2);
    const std::size_t h = pick(k, 7), w = pick(k, 7);
    const std::size_t oh = (h + 2 * pad - k) / stride + 1, ow = (w + 2 * pad - k) / stride + 1;
    const auto proj = random_tensor(rng, {b, f, oh, ow});
    auto fn = [&](nn::Tape<double>& t, std::span<const nn::Var> v) {
      return project(t, nn::conv2d(t, v[0], v[1], v[2], stride, pad), proj);
    };
    out.push_back({"conv2d", nn::grad_check(fn, {random_tensor(rng, {b, c, h, w}),
                                                 random_tensor(rng, {f, c, k, k}),
                                                 random_tensor(rng, {f})},
                                            1e-5, 1e-6),
                   1e-6});
  }
  {  // upsample2x (linear)
    const std::size_t b = pick(1, 2), c = pick(1, 3), h = pick(1, 4), w = pick(1, 4);
    const auto proj = random_tensor(rng, {b, c, 2 * h, 2 * w});
    auto fn = [&](nn::Tape<double>& t, std::span<const nn::Var> v) {
      return project(t, nn::upsample2x(t, v[0]), proj);
    };
    out.push_back(
        {"upsample2x", nn::grad_check(fn, {random_tensor(rng, {b, c, h, w})}, 1e-4, 1e-6), 1e-6});
  }
  {  // relu
    const Shape s{pick(1, 2), pick(1, 3), pick(1, 5), pick(1, 5)};
    const auto proj = random_tensor(rng, s);
    auto fn = [&](nn::Tape<double>& t, std::span<const nn::Var> v) {
      return project(t, nn::relu(t, v[0]), proj);
    };
    out.push_back({"relu", nn::grad_check(fn, {kink_free_tensor(rng, s)}, 1e-4, 1e-4), 1e-4});
  }
  {  // sigmoid
    const Shape s{pick(1, 2), pick(1, 3), pick(1, 5), pick(1, 5)};
    const auto proj = random_tensor(rng, s);
    auto fn = [&](nn::Tape<double>& t, std::span<const nn::Var> v) {
      return project(t, nn::sigmoid(t, v[0]), proj);
    };
    out.push_back(
        {"sigmoid", nn::grad_check(fn, {random_tensor(rng, s, -4, 4)}, 1e-5, 1e-4), 1e-4});
  }
  {  // concat_channels (linear)
    const std::size_t b = pick(1, 2), c1 = pick(1, 3), c2 = pick(1, 3), h = pick(1, 4),
                      w = pick(1, 4);
    const auto proj = random_tensor(rng, {b, c1 + c2, h, w});
    auto fn = [&](nn::Tape<double>& t, std::span<const nn::Var> v) {
      return project(t, nn::concat_channels(t, v[0], v[1]), proj);
    };
    out.push_back({"concat_channels",
                   nn::grad_check(fn, {random_tensor(rng, {b, c1, h, w}),
                                       random_tensor(rng, {b, c2, h, w})},
                                  1e-4, 1e-6),
                   1e-6});
  }
  {  // mul and sum
    const Shape s{pick(1, 3), pick(1, 4)};
    auto fn = [](nn::Tape<double>& t, std::span<const nn::Var> v) {
      return nn::sum(t, nn::mul(t, v[0], v[1]));
    };
    out.push_back({"mul_sum",
                   nn::grad_check(fn, {random_tensor(rng, s), random_tensor(rng, s)}, 1e-4, 1e-6),
                   1e-6});
  }
  {  // dice_loss w.r.t. predictions in (0, 1)
    const Shape s{pick(1, 2), 1, pick(2, 5), pick(2, 5)};
    NdArray<double> target(s);
    for (auto& v : target.storage()) v = uniform(rng, 0, 1) < 0.4 ? 1.0 : 0.0;
    const double smooth = uniform(rng, 0.1, 2.0);
    auto fn = [&](nn::Tape<double>& t, std::span<const nn::Var> v) {
      return nn::dice_loss(t, v[0], target, smooth);
    };
    out.push_back({"dice_loss",
                   nn::grad_check(fn, {random_tensor(rng, s, 0.05, 0.95)}, 1e-6, 1e-3), 1e-3});
  }
  {  // conv -> relu -> conv -> sigmoid -> dice composite on (1, 2, 8, 8)
    NdArray<double> target({1, 1, 8, 8});
    for (auto& v : target.storage()) v = uniform(rng, 0, 1) < 0.3 ? 1.0 : 0.0;
    auto fn = [&](nn::Tape<double>& t, std::span<const nn::Var> v) {
      const nn::Var h = nn::relu(t, nn::conv2d(t, v[0], v[1], v[2], 1, 1));
      const nn::Var y = nn::sigmoid(t, nn::conv2d(t, h, v[3], v[4], 1, 1));
      return nn::dice_loss(t, y, target, 1.0);
    };
    out.push_back({"composite",
                   nn::grad_check(fn, {random_tensor(rng, {1, 2, 8, 8}),
                                       random_tensor(rng, {3, 2, 3, 3}, -0.5, 0.5),
                                       random_tensor(rng, {3}, -0.1, 0.1),
                                       random_tensor(rng, {1, 3, 3, 3}, -0.5, 0.5),
                                       random_tensor(rng, {1}, -0.1, 0.1)},
                                  1e-6, 1e-3),
                   1e-3});
  }
  return out;
}

}  // namespace hseg::testing
