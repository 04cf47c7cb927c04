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
#include <functional>
#include <span>
#include <vector>

#include "hseg/nn/tape.hpp"

namespace hseg::nn {

/// Builds a scalar on a fresh tape from one Var per input.
using ScalarFunction = std::function<Var(Tape<double>&, std::span<const Var>)>;

struct GradCheckReport {
  /// max over elements of |analytic - numeric| / max(|numeric|, 1)
  double max_relative_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_element = 0;
  bool passed = false;
};

/// Compares tape gradients with central differences of width 2 * step.
GradCheckReport grad_check(const ScalarFunction& function, std::vector<NdArray<double>> inputs,
                           double step, double tolerance);

}  // namespace hseg::nn
