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

#include "hseg/nn/optim.hpp"

#include <cmath>

#include "hseg/error.hpp"

namespace hseg::nn {

template <typename T>
void adam_step(std::span<Parameter<T>> params, std::span<const NdArray<T>> grads,
               AdamState<T>& state, double lr) {
  if (params.size() != grads.size()) {
    throw RangeError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.value.shape(), T{0});
      state.second_moment.emplace_back(p.value.shape(), T{0});
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw RangeError("adam_step: optimizer state does not match parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].shape() != params[i].value.shape() ||
        state.first_moment[i].shape() != params[i].value.shape()) {
      throw RangeError("adam_step: shape mismatch for parameter '" + params[i].name + "'");
    }
    for (T g : grads[i].data()) {
      if (!std::isfinite(g)) {
        throw NumericError("adam_step: non-finite gradient for parameter '" + params[i].name + "'");
      }
    }
  }

  ++state.step;
  const double b1 = state.beta1, b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].value;
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    const auto& g = grads[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double gk = static_cast<double>(g[k]);
      const double mk = b1 * static_cast<double>(m[k]) + (1.0 - b1) * gk;
      const double vk = b2 * static_cast<double>(v[k]) + (1.0 - b2) * gk * gk;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      if (lr != 0.0) {
        const double update = lr * (mk / c1) / (std::sqrt(vk / c2) + state.epsilon);
        value[k] = static_cast<T>(static_cast<double>(value[k]) - update);
      }
    }
  }
}

double lr_inverse_time(double base_lr, std::size_t iteration, double decay_rate) {
  return base_lr / (1.0 + decay_rate * static_cast<double>(iteration));
}

template void adam_step<float>(std::span<Parameter<float>>, std::span<const NdArray<float>>,
                               AdamState<float>&, double);
template void adam_step<double>(std::span<Parameter<double>>, std::span<const NdArray<double>>,
                                AdamState<double>&, double);

}  // namespace hseg::nn
