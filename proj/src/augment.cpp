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

#include "hseg/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "hseg/error.hpp"

namespace hseg {
namespace {

void check_image(const NdArray<float>& image, const char* what) {
  if (image.rank() != 3) {
    throw RangeError(std::string(what) + ": expected a (C, H, W) image, got " +
                     shape_to_string(image.shape()));
  }
}

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

// Gaussian smoothing truncated at 3 sigma, zero borders.
NdArray<double> smooth(const NdArray<double>& field, double sigma) {
  const std::size_t h = field.dim(0), w = field.dim(1);
  if (sigma <= 0.0) return field;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    norm += kernel[i + radius];
  }
  for (auto& k : kernel) k /= norm;
  NdArray<double> tmp({h, w}, 0.0), out({h, w}, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const long cc = static_cast<long>(c) + k;
        if (cc >= 0 && cc < static_cast<long>(w)) acc += kernel[k + radius] * field(r, cc);
      }
      tmp(r, c) = acc;
    }
  }
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const long rr = static_cast<long>(r) + k;
        if (rr >= 0 && rr < static_cast<long>(h)) acc += kernel[k + radius] * tmp(rr, c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

// Homography taking the image corners to the jittered corners.
Eigen::Matrix3d corner_homography(const GeometricParams& p, double h, double w) {
  const double src[4][2] = {{0, 0}, {0, w - 1}, {h - 1, w - 1}, {h - 1, 0}};
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = src[i][0], y = src[i][1];
    const double u = x + p.corner_jitter[i][0], v = y + p.corner_jitter[i][1];
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> sol = a.fullPivLu().solve(b);
  Eigen::Matrix3d m;
  m << sol(0), sol(1), sol(2), sol(3), sol(4), sol(5), sol(6), sol(7), 1.0;
  return m;
}

}  // namespace

void AugmentConfig::validate() const {
  if (!finite_all({additive_std, multiplicative_low, multiplicative_high, rotate_max_deg,
                   shift_max_frac, scale_low, scale_high, perspective_jitter_frac,
                   elastic_alpha, elastic_sigma, cutout_frac})) {
    throw ConfigError("augment: bounds must be finite");
  }
  if (additive_std < 0 || perspective_jitter_frac < 0 || elastic_alpha < 0 ||
      elastic_sigma < 0 || rotate_max_deg < 0 || shift_max_frac < 0) {
    throw ConfigError("augment: magnitudes must be nonnegative");
  }
  if (multiplicative_low > multiplicative_high || scale_low > scale_high || scale_low <= 0) {
    throw ConfigError("augment: ranges must be ordered (and scale positive)");
  }
  if (!(cutout_frac > 0.0 && cutout_frac < 1.0)) {
    throw ConfigError("augment: cutout_frac must lie in (0, 1)");
  }
  if (!probability(p_invert) || !probability(p_noise) || !probability(p_geometric) ||
      !probability(p_cutout)) {
    throw ConfigError("augment: probabilities must lie in [0, 1]");
  }
}

AugmentConfig AugmentConfig::disabled() {
  AugmentConfig cfg;
  cfg.p_invert = cfg.p_noise = cfg.p_geometric = cfg.p_cutout = 0.0;
  return cfg;
}

NdArray<float> apply_inversion(const NdArray<float>& image) {
  NdArray<float> out = image;
  if (out.size() == 0) return out;
  const auto [lo, hi] = std::minmax_element(out.storage().begin(), out.storage().end());
  const float sum = *lo + *hi;
  for (auto& v : out.storage()) v = sum - v;
  return out;
}

NdArray<float> apply_noise(const NdArray<float>& image, const AugmentConfig& cfg, Rng& rng) {
  NdArray<float> out = image;
  const bool mult = cfg.multiplicative_low != 1.0 || cfg.multiplicative_high != 1.0;
  const bool add = cfg.additive_std > 0.0;
  if (!mult && !add) return out;
  std::uniform_real_distribution<double> m(cfg.multiplicative_low, cfg.multiplicative_high);
  std::normal_distribution<double> a(0.0, add ? cfg.additive_std : 1.0);
  for (auto& v : out.data()) {
    double x = v;
    if (mult) x *= m(rng);
    if (add) x += a(rng);
    v = static_cast<float>(x);
  }
  return out;
}

GeometricParams sample_geometric(const AugmentConfig& cfg, std::size_t height,
                                 std::size_t width, Rng& rng) {
  GeometricParams p;
  const double h = static_cast<double>(height), w = static_cast<double>(width);
  p.angle_deg = uniform(rng, -cfg.rotate_max_deg, cfg.rotate_max_deg);
  p.scale = cfg.scale_low == cfg.scale_high ? cfg.scale_low
                                            : uniform(rng, cfg.scale_low, cfg.scale_high);
  p.shift_row = uniform(rng, -cfg.shift_max_frac, cfg.shift_max_frac) * h;
  p.shift_col = uniform(rng, -cfg.shift_max_frac, cfg.shift_max_frac) * w;
  for (auto& corner : p.corner_jitter) {
    corner[0] = uniform(rng, -cfg.perspective_jitter_frac, cfg.perspective_jitter_frac) * h;
    corner[1] = uniform(rng, -cfg.perspective_jitter_frac, cfg.perspective_jitter_frac) * w;
  }
  if (cfg.elastic_alpha > 0.0) {
    NdArray<double> dr({height, width}), dc({height, width});
    for (auto& v : dr.data()) v = uniform(rng, -1.0, 1.0);
    for (auto& v : dc.data()) v = uniform(rng, -1.0, 1.0);
    p.elastic_row = smooth(dr, cfg.elastic_sigma);
    p.elastic_col = smooth(dc, cfg.elastic_sigma);
    for (auto& v : p.elastic_row.data()) v *= cfg.elastic_alpha;
    for (auto& v : p.elastic_col.data()) v *= cfg.elastic_alpha;
  }
  return p;
}

std::pair<NdArray<double>, NdArray<double>> source_coordinates(const GeometricParams& p,
                                                               std::size_t height,
                                                               std::size_t width) {
  const double h = static_cast<double>(height), w = static_cast<double>(width);
  const bool elastic = !p.elastic_row.empty();
  if (elastic && (p.elastic_row.shape() != Shape{height, width} ||
                  p.elastic_col.shape() != Shape{height, width})) {
    throw RangeError("geometric: elastic field shape mismatch");
  }
  const bool perspective = std::any_of(p.corner_jitter.begin(), p.corner_jitter.end(),
                                       [](const auto& c) { return c[0] != 0.0 || c[1] != 0.0; });
  const Eigen::Matrix3d hom = perspective ? corner_homography(p, h, w) : Eigen::Matrix3d::Identity();
  const double theta = p.angle_deg * std::numbers::pi / 180.0;
  const double cos_t = p.angle_deg == 0.0 ? 1.0 : std::cos(theta);
  const double sin_t = p.angle_deg == 0.0 ? 0.0 : std::sin(theta);
  const double cr = (h - 1.0) / 2.0, cc = (w - 1.0) / 2.0;

  NdArray<double> rows({height, width}), cols({height, width});
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      double y = static_cast<double>(r), x = static_cast<double>(c);
      if (elastic) {
        y += p.elastic_row(r, c);
        x += p.elastic_col(r, c);
      }
      if (perspective) {
        const Eigen::Vector3d q = hom * Eigen::Vector3d(y, x, 1.0);
        y = q(0) / q(2);
        x = q(1) / q(2);
      }
      // Inverse of: rotate by theta about the centre, scale, then shift.
      const double dy = (y - p.shift_row - cr) / p.scale;
      const double dx = (x - p.shift_col - cc) / p.scale;
      rows(r, c) = cr + cos_t * dy + sin_t * dx;
      cols(r, c) = cc - sin_t * dy + cos_t * dx;
    }
  }
  return {std::move(rows), std::move(cols)};
}

std::pair<NdArray<float>, NdArray<float>> warp(const NdArray<float>& image,
                                               const NdArray<float>& mask,
                                               const GeometricParams& params) {
  check_image(image, "geometric");
  if (image.shape() != mask.shape()) {
    throw RangeError("geometric: image " + shape_to_string(image.shape()) + " and mask " +
                     shape_to_string(mask.shape()) + " differ in shape");
  }
  const std::size_t ch = image.dim(0), h = image.dim(1), w = image.dim(2);
  const auto [rows, cols] = source_coordinates(params, h, w);
  NdArray<float> out_img(image.shape(), 0.0f), out_mask(mask.shape(), 0.0f);
  constexpr double eps = 1e-9;
  const double hmax = static_cast<double>(h) - 1.0, wmax = static_cast<double>(w) - 1.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double y = rows(r, c), x = cols(r, c);
      if (y < -eps || y > hmax + eps || x < -eps || x > wmax + eps) continue;
      const double yc = std::clamp(y, 0.0, hmax), xc = std::clamp(x, 0.0, wmax);
      const auto y0 = static_cast<std::size_t>(std::floor(yc));
      const auto x0 = static_cast<std::size_t>(std::floor(xc));
      const std::size_t y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
      const double fy = yc - static_cast<double>(y0), fx = xc - static_cast<double>(x0);
      const auto ny = static_cast<std::size_t>(std::lround(yc));
      const auto nx = static_cast<std::size_t>(std::lround(xc));
      for (std::size_t k = 0; k < ch; ++k) {
        const double v = (1 - fy) * ((1 - fx) * image(k, y0, x0) + fx * image(k, y0, x1)) +
                         fy * ((1 - fx) * image(k, y1, x0) + fx * image(k, y1, x1));
        out_img(k, r, c) = static_cast<float>(v);
        out_mask(k, r, c) = mask(k, ny, nx) > 0.5f ? 1.0f : 0.0f;
      }
    }
  }
  return {std::move(out_img), std::move(out_mask)};
}

std::pair<NdArray<float>, NdArray<float>> apply_geometric(const NdArray<float>& image,
                                                          const NdArray<float>& mask,
                                                          const AugmentConfig& cfg, Rng& rng) {
  check_image(image, "geometric");
  const auto params = sample_geometric(cfg, image.dim(1), image.dim(2), rng);
  return warp(image, mask, params);
}

NdArray<float> apply_cutout(const NdArray<float>& image, const AugmentConfig& cfg, Rng& rng) {
  check_image(image, "cutout");
  NdArray<float> out = image;
  if (cfg.cutout_count == 0 || image.empty()) return out;
  double sum = 0.0;
  for (float v : image.data()) sum += v;
  const auto fill = static_cast<float>(sum / static_cast<double>(image.size()));
  const std::size_t ch = image.dim(0), h = image.dim(1), w = image.dim(2);
  const double side = std::sqrt(cfg.cutout_frac);
  const auto rh = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(side * static_cast<double>(h))), 1, h);
  const auto rw = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(side * static_cast<double>(w))), 1, w);
  for (std::size_t n = 0; n < cfg.cutout_count; ++n) {
    const std::size_t r0 = std::uniform_int_distribution<std::size_t>(0, h - rh)(rng);
    const std::size_t c0 = std::uniform_int_distribution<std::size_t>(0, w - rw)(rng);
    for (std::size_t k = 0; k < ch; ++k) {
      for (std::size_t r = r0; r < r0 + rh; ++r) {
        std::fill_n(out.raw() + out.offset(k, r, c0), rw, fill);
      }
    }
  }
  return out;
}

std::pair<NdArray<float>, NdArray<float>> compose(const NdArray<float>& image,
                                                  const NdArray<float>& mask,
                                                  const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  check_image(image, "compose");
  NdArray<float> img = image, msk = mask;
  if (uniform(rng, 0.0, 1.0) < cfg.p_invert) img = apply_inversion(img);
  if (uniform(rng, 0.0, 1.0) < cfg.p_noise) img = apply_noise(img, cfg, rng);
  if (uniform(rng, 0.0, 1.0) < cfg.p_geometric) {
    std::tie(img, msk) = apply_geometric(img, msk, cfg, rng);
  }
  if (uniform(rng, 0.0, 1.0) < cfg.p_cutout) img = apply_cutout(img, cfg, rng);
  return {std::move(img), std::move(msk)};
}

}  // namespace hseg
