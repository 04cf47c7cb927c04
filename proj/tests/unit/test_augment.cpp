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

#include <gtest/gtest.h>

#include <cmath>

#include "hseg/augment.hpp"
#include "hseg/error.hpp"

namespace hseg {
namespace {

AugmentConfig zero_geometry() {
  AugmentConfig cfg;
  cfg.rotate_max_deg = 0;
  cfg.shift_max_frac = 0;
  cfg.scale_low = cfg.scale_high = 1.0;
  cfg.perspective_jitter_frac = 0;
  cfg.elastic_alpha = 0;
  return cfg;
}

AugmentConfig degenerate() {
  AugmentConfig cfg = zero_geometry();
  cfg.additive_std = 0;
  cfg.multiplicative_low = cfg.multiplicative_high = 1.0;
  cfg.cutout_count = 0;
  cfg.p_invert = 0;  // inversion has no identity setting
  return cfg;
}

NdArray<float> random_image(Rng& rng, Shape shape) {
  NdArray<float> img(std::move(shape));
  for (auto& v : img.storage()) v = static_cast<float>(uniform(rng, 0.0, 1.0));
  return img;
}

NdArray<float> random_mask(Rng& rng, Shape shape) {
  NdArray<float> m(std::move(shape));
  for (auto& v : m.storage()) v = uniform(rng, 0.0, 1.0) < 0.2 ? 1.0f : 0.0f;
  return m;
}

TEST(InversionTest, HandComputedAndRangePreserving) {
  const NdArray<float> img({1, 1, 4}, {0.0f, 0.25f, 0.5f, 1.0f});
  EXPECT_EQ(apply_inversion(img).storage(), (AlignedVector<float>{1.0f, 0.75f, 0.5f, 0.0f}));

  const NdArray<float> shifted({1, 2, 2}, {-3.0f, -1.0f, 2.0f, 5.0f});
  EXPECT_EQ(apply_inversion(shifted).storage(), (AlignedVector<float>{5.0f, 3.0f, 0.0f, -3.0f}));

  const NdArray<float> flat({2, 3, 3}, 0.4f);
  EXPECT_EQ(apply_inversion(flat), flat);
}

TEST(InversionTest, InvolutionWithinRounding) {
  Rng rng(12);
  const auto img = random_image(rng, {2, 16, 16});
  const auto back = apply_inversion(apply_inversion(img));
  for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(back[i], img[i], 1e-6f);
}

TEST(NoiseTest, DegenerateIsIdentity) {
  Rng rng(1);
  const auto img = random_image(rng, {2, 8, 8});
  EXPECT_EQ(apply_noise(img, degenerate(), rng), img);
}

TEST(NoiseTest, SeededDeterminism) {
  Rng r0(2);
  const auto img = random_image(r0, {1, 16, 16});
  Rng a(7), b(7);
  EXPECT_EQ(apply_noise(img, AugmentConfig{}, a), apply_noise(img, AugmentConfig{}, b));
}

TEST(NoiseTest, AdditiveMeanWithinThreeSigma) {
  AugmentConfig cfg = degenerate();
  cfg.additive_std = 1.0;
  Rng rng(3);
  const NdArray<float> zero({1, 100, 100});
  const auto out = apply_noise(zero, cfg, rng);
  double mean = 0.0;
  for (float v : out.storage()) mean += v;
  mean /= 1e4;
  EXPECT_LT(std::fabs(mean), 3.0 / std::sqrt(1e4));
}

TEST(GeometricTest, ZeroParametersAreIdentity) {
  Rng rng(4);
  const auto img = random_image(rng, {2, 9, 7});
  const auto mask = random_mask(rng, {2, 9, 7});
  const auto [i2, m2] = apply_geometric(img, mask, zero_geometry(), rng);
  EXPECT_EQ(i2, img);
  EXPECT_EQ(m2, mask);
}

TEST(GeometricTest, NinetyDegreeRotationOfEnumeratedGrid) {
  NdArray<float> grid({1, 4, 4});
  for (std::size_t i = 0; i < 16; ++i) grid[i] = static_cast<float>(i);
  GeometricParams p;
  p.angle_deg = 90.0;
  const auto [out, mask] = warp(grid, NdArray<float>({1, 4, 4}), p);
  // Counter-clockwise quarter turn: the right column becomes the top row.
  const float expected[4][4] = {{3, 7, 11, 15}, {2, 6, 10, 14}, {1, 5, 9, 13}, {0, 4, 8, 12}};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(out(0, r, c), expected[r][c], 1e-5);
  }
}

// Reference transport of a single spike through a coordinate grid.
TEST(GeometricTest, SpikeStaysAlignedWithMask) {
  AugmentConfig cfg;
  cfg.elastic_alpha = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const std::size_t h = 17, w = 23;
    const std::size_t sr = 4 + rng() % 9, sc = 4 + rng() % 15;
    NdArray<float> img({1, h, w}), mask({1, h, w});
    img(0, sr, sc) = 1.0f;
    mask(0, sr, sc) = 1.0f;
    const auto params = sample_geometric(cfg, h, w, rng);
    const auto [rows, cols] = source_coordinates(params, h, w);
    const auto [oi, om] = warp(img, mask, params);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const double dy = std::fabs(rows(r, c) - static_cast<double>(sr));
        const double dx = std::fabs(cols(r, c) - static_cast<double>(sc));
        const double weight = std::max(0.0, 1 - dy) * std::max(0.0, 1 - dx);
        ASSERT_NEAR(oi(0, r, c), weight, 1e-5);
        const bool nearest = std::lround(rows(r, c)) == static_cast<long>(sr) &&
                             std::lround(cols(r, c)) == static_cast<long>(sc);
        ASSERT_EQ(om(0, r, c), nearest ? 1.0f : 0.0f);
        if (om(0, r, c) == 1.0f) ASSERT_GT(oi(0, r, c), 0.25f);
      }
    }
  }
}

TEST(GeometricTest, TransportedIndicatorEqualsWarpedMask) {
  Rng rng(5);
  const AugmentConfig cfg;
  for (int trial = 0; trial < 30; ++trial) {
    const auto mask = random_mask(rng, {1, 20, 20});
    const auto params = sample_geometric(cfg, 20, 20, rng);
    const auto [rows, cols] = source_coordinates(params, 20, 20);
    const auto [oi, om] = warp(mask, mask, params);
    for (std::size_t r = 0; r < 20; ++r) {
      for (std::size_t c = 0; c < 20; ++c) {
        const double y = rows(r, c), x = cols(r, c);
        float expected = 0.0f;
        if (y >= -1e-9 && y <= 19 + 1e-9 && x >= -1e-9 && x <= 19 + 1e-9) {
          expected = mask(0, std::lround(std::clamp(y, 0.0, 19.0)),
                          std::lround(std::clamp(x, 0.0, 19.0)));
        }
        ASSERT_EQ(om(0, r, c), expected);
      }
    }
  }
}

TEST(GeometricTest, ShapeMismatchRejected) {
  Rng rng(6);
  EXPECT_THROW(apply_geometric(NdArray<float>({1, 4, 4}), NdArray<float>({1, 4, 5}),
                               AugmentConfig{}, rng),
               RangeError);
}

TEST(CutoutTest, CountZeroAndConstantImage) {
  Rng rng(7);
  const auto img = random_image(rng, {1, 10, 10});
  AugmentConfig none;
  none.cutout_count = 0;
  EXPECT_EQ(apply_cutout(img, none, rng), img);
  const NdArray<float> flat({2, 10, 10}, 0.375f);
  EXPECT_EQ(apply_cutout(flat, AugmentConfig{}, rng), flat);
}

TEST(CutoutTest, RectangleAreaByCellCounting) {
  for (double frac : {0.05, 0.1, 0.25, 0.5}) {
    Rng rng(static_cast<std::uint64_t>(frac * 1000));
    NdArray<float> img({1, 40, 30});
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = (i % 2) ? 1.0f : 0.0f;
    img[0] = 0.25f;  // mean differs from every cell
    AugmentConfig cfg;
    cfg.cutout_frac = frac;
    const auto out = apply_cutout(img, cfg, rng);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < img.size(); ++i) changed += out[i] != img[i];
    const double target = frac * 40 * 30;
    const double side = std::sqrt(frac);
    // Each side is rounded to a whole cell.
    EXPECT_LE(std::fabs(static_cast<double>(changed) - target), 0.5 * 40 * side + 0.5 * 30 * side + 0.25)
        << frac;
  }
}

TEST(ComposeTest, GatesAndDegenerateComposition) {
  Rng r0(8);
  const auto img = random_image(r0, {1, 12, 12});
  const auto mask = random_mask(r0, {1, 12, 12});
  Rng rng(9);
  const auto [a, b] = compose(img, mask, AugmentConfig::disabled(), rng);
  EXPECT_EQ(a, img);
  EXPECT_EQ(b, mask);
  AugmentConfig all = degenerate();
  all.p_noise = all.p_geometric = all.p_cutout = 1.0;
  const auto [c, d] = compose(img, mask, all, rng);
  EXPECT_EQ(c, img);
  EXPECT_EQ(d, mask);
}

TEST(ComposeTest, DeterministicBinaryAndShapePreserving) {
  AugmentConfig cfg;
  cfg.p_invert = cfg.p_noise = cfg.p_geometric = cfg.p_cutout = 1.0;
  Rng r0(10);
  const auto img = random_image(r0, {3, 16, 24});
  const auto mask = random_mask(r0, {3, 16, 24});
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng a(seed), b(seed);
    const auto x = compose(img, mask, cfg, a);
    const auto y = compose(img, mask, cfg, b);
    ASSERT_EQ(x.first, y.first);
    ASSERT_EQ(x.second, y.second);
    ASSERT_EQ(x.first.shape(), img.shape());
    ASSERT_EQ(x.second.shape(), mask.shape());
    for (float v : x.second.storage()) ASSERT_TRUE(v == 0.0f || v == 1.0f);
  }
}

TEST(AugmentConfigTest, Validation) {
  AugmentConfig bad;
  bad.p_cutout = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = AugmentConfig{};
  bad.cutout_frac = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = AugmentConfig{};
  bad.rotate_max_deg = INFINITY;
  EXPECT_THROW(bad.validate(), ConfigError);
}

}  // namespace
}  // namespace hseg
