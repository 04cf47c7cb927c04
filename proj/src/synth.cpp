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

#include "hseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hseg/error.hpp"
#include "hseg/rng.hpp"

namespace hseg {
namespace {

// Separable Gaussian blur with mirrored borders.
void blur_inplace(std::vector<double>& field, std::size_t rows, std::size_t cols,
                  double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    norm += kernel[i + radius];
  }
  for (auto& k : kernel) k /= norm;
  const auto mirror = [](long i, long n) {
    if (n == 1) return 0L;
    const long period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
  };
  std::vector<double> tmp(field.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] *
               field[r * cols + mirror(static_cast<long>(c) + k, static_cast<long>(cols))];
      }
      tmp[r * cols + c] = acc;
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] *
               tmp[mirror(static_cast<long>(r) + k, static_cast<long>(rows)) * cols + c];
      }
      field[r * cols + c] = acc;
    }
  }
}

std::vector<double> smooth_field(Rng& rng, std::size_t rows, std::size_t cols,
                                 double sigma) {
  std::vector<double> field(rows * cols);
  for (auto& v : field) v = normal(rng);
  blur_inplace(field, rows, cols, sigma);
  double peak = 0.0;
  for (double v : field) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0) {
    for (auto& v : field) v /= peak;
  }
  return field;
}

}  // namespace

void SyntheticSpec::validate() const {
  geometry.validate();
  if (n_layers < 2) throw ConfigError("synthetic spec: n_layers must be >= 2");
  if (!(surface_smoothness > 0.0)) throw ConfigError("synthetic spec: surface_smoothness must be positive");
  if (!(relief >= 0.0)) throw ConfigError("synthetic spec: relief must be nonnegative");
  if (!(fault_throw >= 0.0)) throw ConfigError("synthetic spec: fault_throw must be nonnegative");
  if (!(wavelet_peak_hz > 0.0)) throw ConfigError("synthetic spec: wavelet_peak_hz must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("synthetic spec: noise_std must be nonnegative");
  const double spacing = static_cast<double>(geometry.n_samples) / static_cast<double>(n_layers);
  if (spacing < kMinInterfaceSeparation) {
    throw ConfigError("synthetic spec: " + std::to_string(n_layers) + " layers do not fit in " +
                      std::to_string(geometry.n_samples) + " samples with " +
                      "minimum interface separation");
  }
}

double ricker(double peak_hz, double t_seconds) {
  const double a = std::numbers::pi * peak_hz * t_seconds;
  const double a2 = a * a;
  return (1.0 - 2.0 * a2) * std::exp(-a2);
}

SyntheticCube synthesize_cube(const SyntheticSpec& spec) {
  spec.validate();
  const auto& g = spec.geometry;
  Rng rng(spec.seed);
  const std::size_t n_interfaces = spec.n_layers - 1;
  const std::size_t traces = g.trace_count();

  std::vector<std::vector<double>> depth(n_interfaces, std::vector<double>(traces));
  const auto shared = smooth_field(rng, g.n_inlines, g.n_crosslines, spec.surface_smoothness);
  for (std::size_t k = 0; k < n_interfaces; ++k) {
    const auto own = smooth_field(rng, g.n_inlines, g.n_crosslines, spec.surface_smoothness);
    const double base = static_cast<double>((k + 1) * g.n_samples) /
                        static_cast<double>(spec.n_layers);
    for (std::size_t t = 0; t < traces; ++t) {
      depth[k][t] = base + spec.relief * (shared[t] + 0.25 * own[t]);
    }
  }

  // Vertical throw on one side of a straight line in the (inline, crossline)
  // plane, applied to every interface.
  for (std::size_t f = 0; f < spec.fault_count; ++f) {
    const double p_il = uniform(rng, 0.0, static_cast<double>(g.n_inlines));
    const double p_xl = uniform(rng, 0.0, static_cast<double>(g.n_crosslines));
    const double angle = uniform(rng, 0.0, std::numbers::pi);
    const double magnitude = spec.fault_throw * uniform(rng, 0.5, 1.0);
    const double throw_samples = uniform(rng, 0.0, 1.0) < 0.5 ? -magnitude : magnitude;
    const double n_il = std::cos(angle), n_xl = std::sin(angle);
    for (std::size_t il = 0; il < g.n_inlines; ++il) {
      for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
        const double side = (static_cast<double>(il) + 0.5 - p_il) * n_il +
                            (static_cast<double>(xl) + 0.5 - p_xl) * n_xl;
        if (side > 0.0) {
          for (auto& d : depth) d[g.trace_index(il, xl)] += throw_samples;
        }
      }
    }
  }

  const double last = static_cast<double>(g.n_samples) - 1.0;
  for (std::size_t t = 0; t < traces; ++t) {
    for (std::size_t k = 0; k < n_interfaces; ++k) {
      const double d = depth[k][t];
      if (!(d > 0.0 && d < last)) {
        throw ConfigError("synthetic cube: interface " + std::to_string(k + 1) +
                          " leaves the depth range at trace " + std::to_string(t));
      }
      if (k > 0 && d - depth[k - 1][t] < kMinInterfaceSeparation) {
        throw ConfigError("synthetic cube: interfaces " + std::to_string(k) + " and " +
                          std::to_string(k + 1) + " closer than " +
                          std::to_string(kMinInterfaceSeparation) + " samples at trace " +
                          std::to_string(t));
      }
    }
  }

  // Impedance steps of random sign give reflectivity tanh(step / 2).
  std::vector<double> reflectivity(n_interfaces);
  for (auto& r : reflectivity) {
    const double step = uniform(rng, 0.2, 0.5) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    r = std::tanh(step / 2.0);
  }

  NdArray<float> values(g.shape());
  const double dt = g.sample_interval_ms / 1000.0;
  for (std::size_t t = 0; t < traces; ++t) {
    float* trace = values.raw() + t * g.n_samples;
    for (std::size_t s = 0; s < g.n_samples; ++s) {
      double amp = 0.0;
      for (std::size_t k = 0; k < n_interfaces; ++k) {
        amp += reflectivity[k] *
               ricker(spec.wavelet_peak_hz, (static_cast<double>(s) - depth[k][t]) * dt);
      }
      if (spec.noise_std > 0.0) amp += normal(rng, 0.0, spec.noise_std);
      trace[s] = static_cast<float>(amp);
    }
  }

  SyntheticCube out{Cube(g, std::move(values)), HorizonSet{}, std::move(reflectivity)};
  out.horizons.source = HorizonSource::GroundTruth;
  for (std::size_t k = 0; k < n_interfaces; ++k) {
    Horizon h(g, "H" + std::to_string(k + 1));
    for (std::size_t il = 0; il < g.n_inlines; ++il) {
      for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
        h.set(il, xl, depth[k][g.trace_index(il, xl)]);
      }
    }
    out.horizons.horizons.push_back(std::move(h));
  }
  return out;
}

}  // namespace hseg
