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

#include "hseg/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace hseg::nn {
namespace {

double evaluate(const ScalarFunction& f, const std::vector<NdArray<double>>& inputs) {
  Tape<double> tape;
  std::vector<Var> vars;
  for (const auto& in : inputs) vars.push_back(tape.leaf(in, false));
  return tape.value(f(tape, vars))[0];
}

}  // namespace

GradCheckReport grad_check(const ScalarFunction& function, std::vector<NdArray<double>> inputs,
                           double step, double tolerance) {
  Tape<double> tape;
  std::vector<Var> vars;
  for (const auto& in : inputs) vars.push_back(tape.leaf(in, true));
  tape.backward(function(tape, vars));

  GradCheckReport report;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const NdArray<double> analytic = tape.grad(vars[i]);
    for (std::size_t k = 0; k < inputs[i].size(); ++k) {
      const double original = inputs[i][k];
      inputs[i][k] = original + step;
      const double up = evaluate(function, inputs);
      inputs[i][k] = original - step;
      const double down = evaluate(function, inputs);
      inputs[i][k] = original;
      const double numeric = (up - down) / (2.0 * step);
      const double err = std::fabs(analytic[k] - numeric) / std::max(std::fabs(numeric), 1.0);
      if (err > report.max_relative_error || std::isnan(err)) {
        report.max_relative_error = std::isnan(err) ? INFINITY : err;
        report.worst_input = i;
        report.worst_element = k;
      }
    }
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace hseg::nn
