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
#include <fstream>
#include <map>

#include "../support/fixtures.hpp"
#include "hseg/error.hpp"
#include "hseg/extract.hpp"
#include "hseg/mask.hpp"
#include "hseg/metrics.hpp"

namespace hseg {
namespace {

using testing::TempDir;

CubeGeometry small_geometry() { return {4, 5, 32, 2.0, 0, 0}; }

Horizon flat(const CubeGeometry& g, const std::string& name, double depth) {
  Horizon h(g, name);
  for (std::size_t i = 0; i < g.n_inlines; ++i) {
    for (std::size_t j = 0; j < g.n_crosslines; ++j) h.set(i, j, depth);
  }
  return h;
}

// ---- text I/O ----

TEST(HorizonIoTest, ParsesMillisecondsToSamples) {
  CubeGeometry g{300, 300, 500, 2.0, 0, 0};
  const Horizon h = parse_horizon("# header\n100 205 833.0\n", g, "h");
  EXPECT_EQ(h.coverage(), 1u);
  EXPECT_EQ(*h.find(100, 205), 416.5);
}

TEST(HorizonIoTest, OriginLabelsAreSubtracted) {
  CubeGeometry g{3, 3, 10, 4.0, 1000, 50};
  const Horizon h = parse_horizon("1002 51 8\n", g, "h");
  EXPECT_EQ(*h.find(2, 1), 2.0);
}

TEST(HorizonIoTest, ErrorPaths) {
  const auto g = small_geometry();
  EXPECT_THROW(parse_horizon("0 0 2\n0 0 4\n", g, "h"), FormatError);
  EXPECT_THROW(parse_horizon("", g, "h"), FormatError);
  EXPECT_THROW(parse_horizon("# only a comment\n", g, "h"), FormatError);
  EXPECT_THROW(parse_horizon("9 0 2\n", g, "h"), RangeError);
  EXPECT_THROW(parse_horizon("0 0 64\n", g, "h"), RangeError);
  try {
    parse_horizon("0 0 2\n1 x 2\n", g, "h");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  try {
    parse_horizon("", g, "h");
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("no points"), std::string::npos);
  }
}

TEST(HorizonIoTest, SaveLoadRoundTripAndCanonicalOrder) {
  TempDir dir;
  CubeGeometry g{300, 300, 500, 2.0, 0, 0};
  Horizon h(g, "top");
  h.set(7, 3, 12.25);
  h.set(100, 205, 416.5);
  h.set(0, 9, 1.5);
  save_horizon(h, dir / "top.txt");
  const Horizon back = load_horizon(dir / "top.txt", g);
  EXPECT_EQ(back.name(), "top");
  for (std::size_t t = 0; t < g.trace_count(); ++t) {
    const double a = h.depths()[t], b = back.depths()[t];
    if (std::isnan(a)) {
      ASSERT_TRUE(std::isnan(b));
    } else {
      ASSERT_NEAR(a, b, 1e-6);
    }
  }
  const std::string text = format_horizon(h);
  EXPECT_EQ(text, "0 9 3\n7 3 24.5\n100 205 833\n");
  Horizon reordered(g, "top");
  reordered.set(100, 205, 416.5);
  reordered.set(0, 9, 1.5);
  reordered.set(7, 3, 12.25);
  EXPECT_EQ(format_horizon(reordered), text);
}

// ---- masks ----

TEST(MaskTest, ThicknessOneAndThree) {
  const auto g = small_geometry();
  HorizonSet set;
  set.horizons.push_back(flat(g, "a", 10.0));
  const auto window = full_window(g);
  const auto m1 = rasterize_mask(set, window, 1);
  const auto m3 = rasterize_mask(set, window, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t s = 0; s < 32; ++s) {
        EXPECT_EQ(m1(i, j, s), s == 10 ? 1.0f : 0.0f);
        EXPECT_EQ(m3(i, j, s), (s >= 9 && s <= 11) ? 1.0f : 0.0f);
      }
    }
  }
  EXPECT_THROW(rasterize_mask(set, window, 2), ConfigError);
}

TEST(MaskTest, OverlapNamesBothHorizons) {
  const auto g = small_geometry();
  HorizonSet set;
  set.horizons.push_back(flat(g, "upper", 10.0));
  set.horizons.push_back(flat(g, "lower", 12.0));
  EXPECT_NO_THROW(rasterize_mask(set, full_window(g), 1));
  try {
    rasterize_mask(set, full_window(g), 3);
    FAIL();
  } catch (const OverlapError& e) {
    EXPECT_EQ(e.first(), "upper");
    EXPECT_EQ(e.second(), "lower");
  }
}

TEST(MaskTest, HolesAndClippingToWindow) {
  const auto g = small_geometry();
  Horizon h(g, "a");
  h.set(1, 1, 3.4);
  h.set(2, 2, 20.0);
  HorizonSet set{{h}};
  const CropWindow w{{1, 1, 2}, {2, 2, 4}};  // depth 2..5
  const auto m = rasterize_mask(set, w, 5);
  EXPECT_EQ(m.shape(), (Shape{2, 2, 4}));
  for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(m(0, 0, s), 1.0f);  // 1..5 clipped to 2..5
  for (std::size_t s = 0; s < 4; ++s) {
    EXPECT_EQ(m(1, 1, s), 0.0f);
    EXPECT_EQ(m(0, 1, s), 0.0f);
  }
}

// ---- extraction ----

// Independent run finder: scans each trace and returns (first, last, centroid).
std::vector<std::tuple<std::size_t, std::size_t, double>> brute_runs(std::span<const float> t,
                                                                     double thr) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> runs;
  std::size_t s = 0;
  while (s < t.size()) {
    if (t[s] < thr) {
      ++s;
      continue;
    }
    std::size_t e = s;
    double wsum = 0.0, dsum = 0.0;
    while (e < t.size() && t[e] >= thr) {
      wsum += t[e];
      dsum += t[e] * static_cast<double>(e);
      ++e;
    }
    runs.emplace_back(s, e - 1, dsum / wsum);
    s = e;
  }
  return runs;
}

TEST(ExtractTest, TracePicksMatchBruteForce) {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<float> trace(1 + rng() % 40);
    for (auto& v : trace) v = uniform(rng, 0.0, 1.0) < 0.6 ? 0.0f : static_cast<float>(uniform(rng, 0.0, 1.0));
    const auto picks = trace_picks(trace, 0.5);
    const auto runs = brute_runs(trace, 0.5);
    ASSERT_EQ(picks.size(), runs.size());
    for (std::size_t k = 0; k < runs.size(); ++k) {
      EXPECT_EQ(picks[k].first, std::get<0>(runs[k]));
      EXPECT_EQ(picks[k].last, std::get<1>(runs[k]));
      EXPECT_NEAR(picks[k].depth, std::get<2>(runs[k]), 1e-12);
    }
  }
}

TEST(ExtractTest, EmptyAndSinglePlane) {
  const auto g = small_geometry();
  NdArray<float> zero(g.shape());
  EXPECT_TRUE(extract_horizons(zero, g).empty());
  NdArray<float> plane(g.shape());
  for (std::size_t t = 0; t < g.trace_count(); ++t) plane[t * 32 + 7] = 1.0f;
  const auto set = extract_horizons(plane, g);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.horizons[0].coverage(), g.trace_count());
  for (double d : set.horizons[0].depths()) EXPECT_EQ(d, 7.0);
  EXPECT_EQ(set.source, HorizonSource::Predicted);
}

TEST(ExtractTest, TwoPlanesOrderedByDepth) {
  const auto g = small_geometry();
  NdArray<float> prob(g.shape());
  for (std::size_t t = 0; t < g.trace_count(); ++t) {
    prob[t * 32 + 20] = 0.9f;
    prob[t * 32 + 10] = 0.8f;
    prob[t * 32 + 11] = 0.6f;
  }
  const auto set = extract_horizons(prob, g);
  ASSERT_EQ(set.size(), 2u);
  for (std::size_t t = 0; t < g.trace_count(); ++t) {
    const auto runs = brute_runs(prob.data().subspan(t * 32, 32), 0.5);
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_NEAR(set.horizons[0].depths()[t], std::get<2>(runs[0]), 1e-12);
    EXPECT_NEAR(set.horizons[1].depths()[t], std::get<2>(runs[1]), 1e-12);
  }
  EXPECT_EQ(set.horizons[0].name(), "P1");
  EXPECT_EQ(set.horizons[1].name(), "P2");
}

TEST(ExtractTest, RejectsBadInputs) {
  const auto g = small_geometry();
  NdArray<float> prob(g.shape());
  EXPECT_THROW(extract_horizons(prob, g, 0.0), ConfigError);
  EXPECT_THROW(extract_horizons(prob, g, 1.0), ConfigError);
  prob[3] = 1.5f;
  EXPECT_THROW(extract_horizons(prob, g), RangeError);
}

TEST(ExtractTest, DropsSmallSurfaces) {
  const auto g = small_geometry();
  NdArray<float> prob(g.shape());
  for (std::size_t t = 0; t < g.trace_count(); ++t) prob[t * 32 + 5] = 1.0f;
  prob[3 * 32 + 25] = 1.0f;  // isolated blob on one trace
  EXPECT_EQ(extract_horizons(prob, g, 0.5, 1).size(), 2u);
  EXPECT_EQ(extract_horizons(prob, g, 0.5, 2).size(), 1u);
}

TEST(ExtractTest, NeverTwoPicksPerTraceInOneSurface) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    CubeGeometry g{6, 7, 24, 2.0, 0, 0};
    NdArray<float> prob(g.shape());
    for (auto& v : prob.storage()) v = uniform(rng, 0.0, 1.0) < 0.3 ? 1.0f : 0.0f;
    const auto set = extract_horizons(prob, g);
    std::size_t picks = 0;
    for (const auto& h : set.horizons) picks += h.coverage();
    std::size_t runs = 0;
    for (std::size_t t = 0; t < g.trace_count(); ++t) {
      runs += brute_runs(prob.data().subspan(t * 24, 24), 0.5).size();
    }
    // A Horizon stores one depth per trace, so every pick lands in exactly one surface.
    EXPECT_EQ(picks, runs);
  }
}

TEST(ExtractTest, RasterizeThenExtractRecoversHorizons) {
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    CubeGeometry g{8, 9, 48, 2.0, 0, 0};
    const auto truth = testing::random_horizons(g, 1 + rng() % 4, rng);
    const auto mask = rasterize_mask(truth, full_window(g), 1);
    const auto got = extract_horizons(mask, g);
    ASSERT_EQ(got.size(), truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
      for (std::size_t t = 0; t < g.trace_count(); ++t) {
        ASSERT_LE(std::fabs(got.horizons[k].depths()[t] - truth.horizons[k].depths()[t]), 0.5);
      }
    }
  }
}

// ---- metrics ----

TEST(CompareTest, Identity) {
  const auto g = small_geometry();
  const Horizon h = flat(g, "a", 5.5);
  const auto row = compare_horizons(h, h, 5.0, 2.0);
  EXPECT_EQ(row.coverage_pct, 100.0);
  EXPECT_EQ(*row.mean_error_ms, 0.0);
  EXPECT_EQ(*row.window_pct, 100.0);
}

TEST(CompareTest, PartialCoverage) {
  CubeGeometry g{10, 10, 32, 2.0, 0, 0};
  const Horizon truth = flat(g, "t", 4.0);
  Horizon pred = flat(g, "p", 4.0);
  for (std::size_t j = 0; j < 10; ++j) pred.erase(9, j);
  const auto row = compare_horizons(pred, truth, 5.0, 2.0);
  EXPECT_EQ(row.coverage_pct, 90.0);
  EXPECT_EQ(*row.mean_error_ms, 0.0);
  EXPECT_EQ(*row.window_pct, 100.0);
}

TEST(CompareTest, SixMillisecondsOnHalfTheTraces) {
  CubeGeometry g{2, 4, 32, 2.0, 0, 0};
  const Horizon truth = flat(g, "t", 10.0);
  Horizon pred = flat(g, "p", 10.0);
  for (std::size_t j = 0; j < 4; ++j) pred.set(0, j, 13.0);
  const auto row = compare_horizons(pred, truth, 5.0, 2.0);
  EXPECT_EQ(*row.window_pct, 50.0);
  EXPECT_EQ(*row.mean_error_ms, 3.0);
}

TEST(CompareTest, DisjointIsUndefined) {
  const auto g = small_geometry();
  Horizon a(g, "a"), b(g, "b");
  a.set(0, 0, 1.0);
  b.set(1, 1, 1.0);
  const auto row = compare_horizons(a, b, 5.0, 2.0);
  EXPECT_EQ(row.coverage_pct, 0.0);
  EXPECT_FALSE(row.mean_error_ms);
  EXPECT_FALSE(row.window_pct);
}

TEST(CompareTest, ErrorSymmetricCoverageAsymmetric) {
  Rng rng(4);
  int asymmetric = 0;
  for (int trial = 0; trial < 200; ++trial) {
    CubeGeometry g{5, 6, 40, 2.0, 0, 0};
    const auto a = testing::random_horizons(g, 1, rng, 4.0, 0.4).horizons[0];
    const auto b = testing::random_horizons(g, 1, rng, 4.0, 0.1).horizons[0];
    const auto ab = compare_horizons(a, b, 5.0, 2.0);
    const auto ba = compare_horizons(b, a, 5.0, 2.0);
    ASSERT_EQ(ab.mean_error_ms.has_value(), ba.mean_error_ms.has_value());
    if (ab.mean_error_ms) {
      EXPECT_NEAR(*ab.mean_error_ms, *ba.mean_error_ms, 1e-12);
      EXPECT_EQ(*ab.window_pct, *ba.window_pct);
    }
    const double common = ab.coverage_pct * static_cast<double>(b.coverage());
    EXPECT_NEAR(common, ba.coverage_pct * static_cast<double>(a.coverage()), 1e-9);
    if (a.coverage() != b.coverage()) {
      EXPECT_NE(ab.coverage_pct, ba.coverage_pct);
      ++asymmetric;
    }
  }
  EXPECT_GT(asymmetric, 100);
}

TEST(CompareTest, WindowRateMonotoneInWindow) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    CubeGeometry g{5, 6, 40, 2.0, 0, 0};
    const auto a = testing::random_horizons(g, 1, rng).horizons[0];
    const auto b = testing::random_horizons(g, 1, rng).horizons[0];
    double prev = -1.0;
    for (double w = 0.5; w < 40.0; w += 0.5) {
      const double rate = *compare_horizons(a, b, w, 2.0).window_pct;
      EXPECT_GE(rate, prev);
      prev = rate;
    }
  }
}

TEST(MatchTest, IdentityEmptyAndCap) {
  const auto g = small_geometry();
  HorizonSet set{{flat(g, "a", 5), flat(g, "b", 15), flat(g, "c", 25)}};
  const auto m = match_horizons(set, set);
  ASSERT_EQ(m.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(m[k], (HorizonMatch{k, k}));
  EXPECT_TRUE(match_horizons(HorizonSet{}, set).empty());
  HorizonSet far{{flat(g, "x", 31)}};
  HorizonSet top{{flat(g, "y", 0)}};
  EXPECT_TRUE(match_horizons(far, top, 25.0).empty());
}

// Lowest total gap over all partial assignments that pair as many as possible.
double exhaustive_best(const std::vector<std::vector<std::optional<double>>>& gap,
                       std::size_t p, std::vector<bool>& used, std::size_t& best_count,
                       std::size_t count, double cost, double& best_cost,
                       std::vector<std::size_t>& cur, std::vector<std::size_t>& best) {
  if (p == gap.size()) {
    if (count > best_count || (count == best_count && cost < best_cost)) {
      best_count = count;
      best_cost = cost;
      best = cur;
    }
    return best_cost;
  }
  cur[p] = SIZE_MAX;
  exhaustive_best(gap, p + 1, used, best_count, count, cost, best_cost, cur, best);
  for (std::size_t t = 0; t < gap[p].size(); ++t) {
    if (used[t] || !gap[p][t] || *gap[p][t] > kMaxMatchDistance) continue;
    used[t] = true;
    cur[p] = t;
    exhaustive_best(gap, p + 1, used, best_count, count + 1, cost + *gap[p][t], best_cost, cur,
                    best);
    used[t] = false;
  }
  cur[p] = SIZE_MAX;
  return best_cost;
}

TEST(MatchTest, NearerTruthWinsAgainstExhaustiveSearch) {
  const auto g = small_geometry();
  HorizonSet truth{{flat(g, "A", 10), flat(g, "B", 20)}};
  HorizonSet pred{{flat(g, "p", 12)}};  // gap 2 to A, 8 to B
  const auto m = match_horizons(pred, truth);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], (HorizonMatch{0, 0}));

  std::vector<std::vector<std::optional<double>>> gap(1);
  for (const auto& t : truth.horizons) gap[0].push_back(mean_depth_gap(pred.horizons[0], t));
  std::vector<bool> used(2);
  std::size_t best_count = 0;
  double best_cost = INFINITY;
  std::vector<std::size_t> cur(1), best(1);
  exhaustive_best(gap, 0, used, best_count, 0, 0.0, best_cost, cur, best);
  EXPECT_EQ(best[0], m[0].truth);
}

TEST(MatchTest, GreedyMatchesReferenceOnRandomSets) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    CubeGeometry g{4, 4, 60, 2.0, 0, 0};
    const auto truth = testing::random_horizons(g, 1 + rng() % 4, rng, 4.0, 0.2);
    const auto pred = testing::random_horizons(g, rng() % 5, rng, 4.0, 0.5);
    // Reference: repeatedly take the globally smallest remaining gap.
    std::vector<bool> pu(pred.size()), tu(truth.size());
    std::vector<HorizonMatch> ref;
    for (;;) {
      double best = INFINITY;
      std::size_t bp = 0, bt = 0;
      for (std::size_t p = 0; p < pred.size(); ++p) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
          if (pu[p] || tu[t]) continue;
          const auto gap = mean_depth_gap(pred.horizons[p], truth.horizons[t]);
          if (gap && *gap <= kMaxMatchDistance && *gap < best) {
            best = *gap;
            bp = p;
            bt = t;
          }
        }
      }
      if (!std::isfinite(best)) break;
      pu[bp] = tu[bt] = true;
      ref.push_back({bp, bt});
    }
    std::sort(ref.begin(), ref.end(), [](auto a, auto b) { return a.truth < b.truth; });
    EXPECT_EQ(match_horizons(pred, truth), ref);
  }
}

}  // namespace
}  // namespace hseg
