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
#include <span>
#include <string>
#include <vector>

#include "hseg/ndarray.hpp"

namespace hseg::nn {

template <typename T>
struct Parameter {
  std::string name;
  NdArray<T> value;

  bool operator==(const Parameter&) const = default;
};

template <typename T>
struct AdamState {
  std::vector<NdArray<T>> first_moment;
  std::vector<NdArray<T>> second_moment;
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam update in place. Moments are created on first use.
/// Throws NumericError naming the parameter when a gradient is not finite.
template <typename T>
void adam_step(std::span<Parameter<T>> params, std::span<const NdArray<T>> grads,
               AdamState<T>& state, double lr);

/// base_lr / (1 + decay_rate * iteration)
double lr_inverse_time(double base_lr, std::size_t iteration, double decay_rate);

}  // namespace hseg::nn
