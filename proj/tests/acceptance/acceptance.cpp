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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: hseg_acceptance [--only 1,2,...] [--out DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"
#include "../support/gradient_suite.hpp"
#include "hseg/evaluation.hpp"
#include "hseg/extract.hpp"
#include "hseg/mask.hpp"
#include "hseg/metrics.hpp"
#include "hseg/native_format.hpp"
#include "hseg/segy.hpp"
#include "hseg/synth.hpp"

namespace hseg {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

// 1 ------------------------------------------------------------------------

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::size_t cases = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& c : testing::run_gradient_suite(seed)) {
      ++cases;
      if (!(c.report.max_relative_error <= worst)) {
        worst = c.report.max_relative_error;
        worst_name = c.name + " seed " + std::to_string(seed);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-3 && elapsed < 120.0,
          std::to_string(cases) + " checks, worst " + fmt("%.2e", worst) + " (" + worst_name +
              "), " + fmt("%.1f", elapsed) + " s"};
}

// 2 ------------------------------------------------------------------------

double dice_value(const NdArray<double>& pred, const NdArray<double>& target, double smooth) {
  nn::Tape<double> tape;
  return tape.value(nn::dice_loss(tape, tape.leaf(pred, false), target, smooth))[0];
}

Outcome dice_correctness() {
  const double a = dice_value(NdArray<double>({2, 3}, 1.0), NdArray<double>({2, 3}, 1.0), 1.0);
  const double b = dice_value(NdArray<double>({4}, 0.0), NdArray<double>({4}, 1.0), 1.0);
  const double c =
      dice_value(NdArray<double>({4}, 0.5), NdArray<double>({4}, {1.0, 1.0, 0.0, 0.0}), 1e-12);
  const bool examples =
      std::fabs(a) <= 1e-9 && std::fabs(b - 0.8) <= 1e-9 && std::fabs(c - 0.5) <= 1e-9;

  Rng rng(20260);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 64;
    NdArray<double> pred({n}), target({n});
    const int mode = static_cast<int>(rng() % 4);
    for (std::size_t k = 0; k < n; ++k) {
      target[k] = rng() % 2 ? 1.0 : 0.0;
      pred[k] = mode == 0   ? static_cast<double>(rng() % 2)
                : mode == 1 ? target[k]
                            : uniform(rng, 0.0, 1.0);
    }
    const double smooth = std::exp(uniform(rng, std::log(1e-6), std::log(10.0)));
    const double loss = dice_value(pred, target, smooth);
    if (!(loss >= 0.0 && loss < 1.0)) ++bad;
  }
  return {examples && bad == 0, "examples (" + fmt("%.12g", a) + ", " + fmt("%.12g", b) + ", " +
                                    fmt("%.12g", c) + "), " + std::to_string(bad) +
                                    "/1000 random pairs outside [0, 1)"};
}

// 3 ------------------------------------------------------------------------

Outcome geometry_round_trip() {
  Rng rng(3003);
  std::size_t failures = 0;
  double worst = 0.0;
  for (int f = 0; f < 100; ++f) {
    const CubeGeometry g{1 + rng() % 6, 4 + rng() % 28, 48 + rng() % 80, 2.0, 0, 0};
    const std::size_t count = 1 + rng() % 4;
    // Dips stay within what the 2-sample flood-fill tolerance can follow.
    const HorizonSet truth = testing::random_horizons(g, count, rng, 4.0, 0.0, 1.0);
    const auto mask = rasterize_mask(truth, full_window(g), 1);
    const HorizonSet got = extract_horizons(mask, g, 0.5, 1);
    bool ok = got.size() == truth.size();
    for (std::size_t k = 0; ok && k < got.size(); ++k) {
      const auto& t = truth.horizons[k];
      const auto& p = got.horizons[k];
      if (p.coverage() != t.coverage()) ok = false;
      for (std::size_t il = 0; ok && il < g.n_inlines; ++il) {
        for (std::size_t xl = 0; ok && xl < g.n_crosslines; ++xl) {
          const auto pd = p.find(il, xl);
          const auto td = t.find(il, xl);
          if (!pd || !td) {
            ok = !pd && !td;
            continue;
          }
          const double err = std::fabs(*pd - *td);
          worst = std::max(worst, err);
          ok = err <= 0.5;
        }
      }
    }
    if (!ok) ++failures;
  }
  return {failures == 0, std::to_string(100 - failures) + "/100 fixtures recovered, worst " +
                             fmt("%.3f", worst) + " samples"};
}

// 4 ------------------------------------------------------------------------

// Independent per-trace count, walking (inline, crossline) coordinates.
MetricRow brute_metrics(const Horizon& pred, const Horizon& truth, double window_ms, double dt) {
  const auto& g = truth.geometry();
  std::size_t truth_n = 0, common = 0, inside = 0;
  double sum = 0.0;
  for (std::size_t il = 0; il < g.n_inlines; ++il) {
    for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
      const auto t = truth.find(il, xl);
      if (!t) continue;
      ++truth_n;
      const auto p = pred.find(il, xl);
      if (!p) continue;
      ++common;
      const double e = std::fabs(*p - *t) * dt;
      sum += e;
      if (e <= window_ms) ++inside;
    }
  }
  MetricRow r;
  r.window_ms = window_ms;
  if (truth_n) r.coverage_pct = 100.0 * static_cast<double>(common) / static_cast<double>(truth_n);
  if (common) {
    r.mean_error_ms = sum / static_cast<double>(common);
    r.window_pct = 100.0 * static_cast<double>(inside) / static_cast<double>(common);
  }
  return r;
}

Outcome metric_oracle() {
  Rng rng(4004);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const CubeGeometry g{1 + rng() % 8, 1 + rng() % 16, 64, 0.5 + 0.5 * (rng() % 8), 0, 0};
    const HorizonSet a = testing::random_horizons(g, 1, rng, 4.0, uniform(rng, 0.0, 0.6));
    Horizon pred = a.horizons[0];
    Horizon truth(g, "T");
    for (std::size_t il = 0; il < g.n_inlines; ++il) {
      for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
        if (uniform(rng, 0.0, 1.0) < 0.3) continue;
        const double base = pred.find(il, xl).value_or(32.0);
        const double jitter = rng() % 3 == 0 ? 0.0 : normal(rng, 0.0, 3.0);
        truth.set(il, xl, std::clamp(base + jitter, 0.0, 63.0));
      }
    }
    if (truth.coverage() == 0) truth.set(0, 0, 10.0);
    const double window = uniform(rng, 0.5, 10.0);
    const MetricRow got = compare_horizons(pred, truth, window, g.sample_interval_ms);
    const MetricRow want = brute_metrics(pred, truth, window, g.sample_interval_ms);
    if (got.coverage_pct != want.coverage_pct || got.mean_error_ms != want.mean_error_ms ||
        got.window_pct != want.window_pct) {
      ++mismatches;
    }
  }

  // Off by 6 ms on half the traces, exact on the rest.
  const CubeGeometry g{1, 10, 64, 2.0, 0, 0};
  Horizon truth(g, "T"), pred(g, "P");
  for (std::size_t xl = 0; xl < 10; ++xl) {
    truth.set(0, xl, 20.0);
    pred.set(0, xl, xl % 2 ? 23.0 : 20.0);
  }
  const MetricRow ex = compare_horizons(pred, truth, 5.0, 2.0);
  const bool example = ex.window_pct == 50.0 && ex.mean_error_ms == 3.0 && ex.coverage_pct == 100.0;
  return {mismatches == 0 && example, std::to_string(mismatches) +
                                          "/1000 mismatches, 6ms/5ms example window " +
                                          fmt("%.17g", ex.window_pct.value_or(-1)) + "%"};
}

// 5 ------------------------------------------------------------------------

Outcome blending_partition() {
  Rng rng(5005);
  std::size_t bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const CubeGeometry g{1 + rng() % 9, 1 + rng() % 24, 2 + rng() % 40, 2.0, 0, 0};
    const Cube cube = testing::random_cube(g, rng, 0.1);
    InferenceConfig cfg;
    cfg.channel_axis = trial % 2 ? Axis::Crossline : Axis::Inline;
    const std::size_t ext[3] = {g.n_inlines, g.n_crosslines, g.n_samples};
    for (int a = 0; a < 3; ++a) {
      cfg.crop_shape[a] = 1 + rng() % ext[a];
      cfg.stride[a] = 1 + rng() % cfg.crop_shape[a];
    }
    cfg.windows_per_batch = 1 + rng() % 8;
    const float c = static_cast<float>(uniform(rng, 0.0, 1.0));
    const auto out = predict_volume(
        [c](const NdArray<float>& b) {
          return NdArray<float>({b.dim(0), 1, b.dim(2), b.dim(3)}, c);
        },
        cube, cfg);
    if (out.shape() != g.shape() ||
        !std::all_of(out.storage().begin(), out.storage().end(),
                     [c](float v) { return std::memcmp(&v, &c, sizeof v) == 0; })) {
      ++bad;
    }
  }
  return {bad == 0, std::to_string(20 - bad) + "/20 combinations bit-constant"};
}

// 6, 7, 8 -------------------------------------------------------------------

struct ExperimentRun {
  Report report;
  std::string text, csv;
  std::vector<std::uint8_t> checkpoint;
};

ExperimentRun run_and_record(const ExperimentSetup& setup, const DataRegistry& data,
                             const fs::path& dir) {
  ExperimentArtifacts art;
  ExperimentRun r;
  std::string log;
  const IterationLogger logger = [&log](std::size_t iter, double lr, double loss) {
    log += format_log_line(iter, lr, loss) + "\n";
  };
  r.report = run_experiment(setup, data, default_trainer(logger), &art);
  r.text = format_report(r.report);
  r.csv = format_report_csv(r.report);
  r.checkpoint = encode_checkpoint(*art.model);
  fs::create_directories(dir);
  write_bytes(dir / "report.txt", r.text);
  write_bytes(dir / "report.csv", r.csv);
  write_bytes(dir / "train.log", log);
  save_checkpoint(*art.model, dir / "model.hfw");
  return r;
}

// Every truth horizon must be matched and meet each bound.
bool meets(const Report& r, std::size_t truth_count, double coverage, double error_ms,
           double window) {
  if (r.rows.size() != truth_count) return false;
  for (const auto& row : r.rows) {
    const auto& m = row.metrics;
    if (m.coverage_pct < coverage) return false;
    if (!m.mean_error_ms || *m.mean_error_ms > error_ms) return false;
    if (!m.window_pct || *m.window_pct < window) return false;
  }
  return true;
}

std::string summary(const ExperimentRun& r) {
  return format_metric_cells(r.report.rows) + " (unmatched truth " +
         std::to_string(r.report.unmatched_truth) + "), " + fmt("%.0f", r.report.runtime_s) +
         " s";
}

SyntheticSpec analog_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.geometry = {64, 64, 128, 2.0, 0, 0};
  s.n_layers = 4;  // three interfaces
  s.seed = seed;
  return s;
}

struct SameCube {
  DataRegistry data;
  ExperimentSetup setup;
};

void prepare_same_cube(SameCube& s) {
  auto syn = synthesize_cube(analog_spec(61));
  const CubeGeometry g = syn.cube.geometry();
  s.data.add("analog", std::move(syn.cube), std::move(syn.horizons));
  s.setup.name = "same-cube analog";
  s.setup.train_cubes = {"analog"};
  s.setup.test_cube = "analog";
  s.setup.same_cube = true;
  s.setup.train_inline_stride = synthetic_inline_stride(g);
  s.setup.train.seed = 7;
  s.setup.train.shape_policy.fixed_shape = {1, 64, 64};
}

struct InterCube {
  DataRegistry data;
  ExperimentSetup setup;
};

void prepare_inter_cube(InterCube& s) {
  const double hz[4] = {20.0, 30.0, 40.0, 25.0};
  const std::size_t faults[4] = {0, 1, 2, 1};
  for (int i = 0; i < 4; ++i) {
    SyntheticSpec spec = analog_spec(71 + i);
    spec.wavelet_peak_hz = hz[i];
    spec.fault_count = faults[i];
    auto syn = synthesize_cube(spec);
    const std::string alias = i < 3 ? "train" + std::to_string(i + 1) : "holdout";
    s.data.add(alias, std::move(syn.cube), std::move(syn.horizons));
  }
  s.setup.name = "inter-cube analog";
  s.setup.train_cubes = {"train1", "train2", "train3"};
  s.setup.test_cube = "holdout";
  s.setup.train_inline_stride = 1;
  s.setup.train.seed = 11;
  s.setup.train.shape_policy.fixed_shape = {1, 64, 64};
}

}  // namespace
}  // namespace hseg

int main(int argc, char** argv) {
  using namespace hseg;
  std::set<int> only;
  fs::path out = "acceptance_artifacts";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
    } else if (arg == "--out" && i + 1 < argc) {
      out = argv[++i];
    } else {
      std::cerr << "usage: hseg_acceptance [--only 1,2,...] [--out DIR]\n";
      return 2;
    }
  }
  auto wanted = [&only](int n) { return only.empty() || only.count(n) != 0; };

  bool all = true;
  auto report = [&all](int n, const char* name, const Outcome& o) {
    all &= o.pass;
    std::cout << "criterion " << n << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  };
  auto guarded = [](const std::function<Outcome()>& fn) -> Outcome {
    try {
      return fn();
    } catch (const std::exception& e) {
      return {false, std::string("threw: ") + e.what()};
    }
  };

  if (wanted(1)) report(1, "gradient suite", guarded(gradient_suite));
  if (wanted(2)) report(2, "dice", guarded(dice_correctness));
  if (wanted(3)) report(3, "geometry round-trip", guarded(geometry_round_trip));
  if (wanted(4)) report(4, "metric oracle", guarded(metric_oracle));
  if (wanted(5)) report(5, "blending", guarded(blending_partition));

  const bool need_same = wanted(6) || wanted(8);
  const bool need_inter = wanted(7) || wanted(8);
  SameCube same;
  InterCube inter;
  std::optional<ExperimentRun> same_a, inter_a;
  if (need_same) {
    const Outcome o = guarded([&] {
      prepare_same_cube(same);
      same_a = run_and_record(same.setup, same.data, out / "same_cube" / "run1");
      const bool ok = meets(same_a->report, 3, 95.0, 4.0, 90.0) && same_a->report.runtime_s <= 1200;
      return Outcome{ok, summary(*same_a)};
    });
    if (wanted(6)) report(6, "same-cube analog", o);
  }
  if (need_inter) {
    const Outcome o = guarded([&] {
      prepare_inter_cube(inter);
      inter_a = run_and_record(inter.setup, inter.data, out / "inter_cube" / "run1");
      const std::size_t truth = inter.data.horizons("holdout").size();
      const bool ok = meets(inter_a->report, truth, 0.0, 1e300, 70.0);
      std::cout << inter_a->text;
      return Outcome{ok, summary(*inter_a)};
    });
    if (wanted(7)) report(7, "inter-cube analog", o);
  }
  if (wanted(8)) {
    report(8, "determinism", guarded([&] {
             if (!same_a || !inter_a) return Outcome{false, "first runs did not complete"};
             const auto s = run_and_record(same.setup, same.data, out / "same_cube" / "run2");
             const auto t = run_and_record(inter.setup, inter.data, out / "inter_cube" / "run2");
             const bool s_ok = s.text == same_a->text && s.csv == same_a->csv &&
                               s.checkpoint == same_a->checkpoint;
             const bool t_ok = t.text == inter_a->text && t.csv == inter_a->csv &&
                               t.checkpoint == inter_a->checkpoint;
             return Outcome{s_ok && t_ok, std::string("same-cube rerun ") +
                                              (s_ok ? "identical" : "differs") +
                                              ", inter-cube rerun " +
                                              (t_ok ? "identical" : "differs")};
           }));
  }

  if (wanted(9)) {
    report(9, "ingestion", guarded([] {
             // IEEE: exact.
             Rng rng(9009);
             const CubeGeometry g{3, 5, 17, 4.0, 100, 200};
             const Cube cube = testing::random_cube(g, rng, 0.2);
             testing::TempDir dir;
             write_segy(cube, dir / "ieee.sgy", SegySampleFormat::IeeeFloat);
             const Cube ieee = ingest_segy(dir / "ieee.sgy");
             const bool ieee_ok = ieee.values() == cube.values() &&
                                  ieee.geometry() == cube.geometry();

             // IBM: hand-decoded constants within 1 ulp, file path exact to the codec.
             const std::pair<std::uint32_t, float> table[] = {
                 {0x41100000u, 1.0f},    {0xC1100000u, -1.0f},      {0x42640000u, 100.0f},
                 {0x40800000u, 0.5f},    {0x41200000u, 2.0f},       {0xC276A000u, -118.625f},
                 {0x40100000u, 0.0625f}, {0x3F100000u, 0.00390625f}};
             bool table_ok = true;
             for (const auto& [bits, value] : table) {
               const float got = ibm_to_ieee(bits);
               table_ok &= got == value || std::nextafter(value, got) == got;
             }
             write_segy(cube, dir / "ibm.sgy", SegySampleFormat::IbmFloat);
             const Cube ibm = ingest_segy(dir / "ibm.sgy");
             bool ibm_ok = ibm.geometry() == cube.geometry();
             for (std::size_t i = 0; ibm_ok && i < cube.values().size(); ++i) {
               ibm_ok = ibm.values()[i] == ibm_to_ieee(ieee_to_ibm(cube.values()[i]));
             }

             save_native(cube, dir / "c.hfc");
             const auto back = encode_native(load_native(dir / "c.hfc"));
             const bool native_ok = back == encode_native(cube) && load_native(dir / "c.hfc") == cube;
             auto yes = [](bool b) { return b ? "ok" : "FAILED"; };
             return Outcome{ieee_ok && table_ok && ibm_ok && native_ok,
                            std::string("ieee ") + yes(ieee_ok) + ", ibm table " + yes(table_ok) +
                                ", ibm file " + yes(ibm_ok) + ", native " + yes(native_ok)};
           }));
  }

  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return all ? 0 : 1;
}
