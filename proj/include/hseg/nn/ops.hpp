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

#include "hseg/nn/tape.hpp"

namespace hseg::nn {

enum class Activation { Relu, Sigmoid };

/// Cross-correlation of (B, C, H, W) with (F, C, k, k) kernels plus bias (F).
/// Output extent is floor((H + 2 * padding - k) / stride) + 1.
template <typename T>
Var conv2d(Tape<T>& tape, Var input, Var kernels, Var bias, std::size_t stride,
           std::size_t padding);

/// Nearest-neighbour 2x upsampling of (B, C, H, W).
template <typename T>
Var upsample2x(Tape<T>& tape, Var input);

template <typename T>
Var activation(Tape<T>& tape, Var input, Activation kind);
template <typename T>
Var relu(Tape<T>& tape, Var input) { return activation(tape, input, Activation::Relu); }
template <typename T>
Var sigmoid(Tape<T>& tape, Var input) { return activation(tape, input, Activation::Sigmoid); }

/// Concatenates two (B, *, H, W) tensors along the channel axis.
template <typename T>
Var concat_channels(Tape<T>& tape, Var a, Var b);

/// 1 - (2 * sum(p * t) + smooth) / (sum(p) + sum(t) + smooth), over all
/// elements. Differentiable in `pred` only.
template <typename T>
Var dice_loss(Tape<T>& tape, Var pred, const NdArray<T>& target, double smooth = 1.0);

/// Sum of all elements, as a scalar.
template <typename T>
Var sum(Tape<T>& tape, Var input);

/// Elementwise product of equally shaped tensors.
template <typename T>
Var mul(Tape<T>& tape, Var a, Var b);

}  // namespace hseg::nn
