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

#include "hseg/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "binary_io.hpp"
#include "hseg/error.hpp"
#include "hseg/extract.hpp"
#include "hseg/native_format.hpp"

namespace hseg {
namespace {

std::string one_decimal(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  std::string s = buf;
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  if (s == "-0") s = "0";
  return s;
}

std::string csv_value(const std::optional<double>& v) {
  if (!v) return "";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

void DataRegistry::add(const std::string& alias, Cube cube, std::optional<HorizonSet> horizons) {
  if (alias.empty()) throw ConfigError("registry: empty alias");
  if (entries_.count(alias)) throw ConfigError("registry: duplicate alias '" + alias + "'");
  if (horizons) {
    horizons->validate();
    for (const auto& h : horizons->horizons) {
      if (h.geometry() != cube.geometry()) {
        throw ConfigError("registry: horizon '" + h.name() + "' does not match cube '" + alias +
                          "' geometry");
      }
    }
  }
  entries_.emplace(alias, Entry{std::move(cube), std::move(horizons)});
}

const DataRegistry::Entry& DataRegistry::entry(const std::string& alias) const {
  const auto it = entries_.find(alias);
  if (it == entries_.end()) throw ConfigError("unknown cube alias '" + alias + "'");
  return it->second;
}

const Cube& DataRegistry::cube(const std::string& alias) const {
  const Entry& e = entry(alias);
  log_.push_back("cube:" + alias);
  return e.cube;
}

const HorizonSet& DataRegistry::horizons(const std::string& alias) const {
  const Entry& e = entry(alias);
  log_.push_back("horizons:" + alias);
  if (!e.horizons) throw ConfigError("no ground-truth horizons for cube '" + alias + "'");
  return *e.horizons;
}

std::vector<std::string> DataRegistry::aliases() const {
  std::vector<std::string> out;
  for (const auto& [alias, e] : entries_) out.push_back(alias);
  return out;
}

void ExperimentSetup::validate() const {
  if (train_cubes.empty()) throw ConfigError("experiment: no train cubes");
  if (test_cube.empty()) throw ConfigError("experiment: no test cube");
  const bool test_in_train =
      std::find(train_cubes.begin(), train_cubes.end(), test_cube) != train_cubes.end();
  if (test_in_train && !same_cube) {
    throw ConfigError("experiment: test cube '" + test_cube +
                      "' is also a train cube; set same_cube to allow it");
  }
  if (same_cube && (train_cubes.size() != 1 || !test_in_train)) {
    throw ConfigError("experiment: same_cube needs train_cubes == {test_cube}");
  }
  if (train_inline_stride < 1) throw ConfigError("experiment: train_inline_stride must be >= 1");
  if (!(window_ms > 0.0)) throw ConfigError("experiment: window_ms must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("experiment: threshold must lie in (0, 1)");
  }
  if (!(min_trace_fraction >= 0.0 && min_trace_fraction <= 1.0)) {
    throw ConfigError("experiment: min_trace_fraction must lie in [0, 1]");
  }
  train.validate();
  model.validate();
}

std::size_t synthetic_inline_stride(const CubeGeometry& geometry) {
  return std::max<std::size_t>(1, geometry.n_inlines / 8);
}

InferenceConfig default_inference(const CubeGeometry& geometry, const ModelConfig& model,
                                  Axis channel_axis, Scaling scaling) {
  const std::size_t div = model.divisor();
  auto round_down = [&](std::size_t extent) {
    if (extent < div) {
      throw ConfigError("cube extent " + std::to_string(extent) + " is smaller than the model's " +
                        std::to_string(div) + "-sample divisor");
    }
    return extent / div * div;
  };
  InferenceConfig cfg;
  cfg.channel_axis = channel_axis;
  cfg.scaling = scaling;
  const std::size_t depth = round_down(geometry.n_samples);
  if (channel_axis == Axis::Inline) {
    const std::size_t xl = round_down(geometry.n_crosslines);
    cfg.crop_shape = {model.input_channels, xl, depth};
    cfg.stride = {1, std::max<std::size_t>(1, xl / 2), std::max<std::size_t>(1, depth / 2)};
  } else {
    const std::size_t il = round_down(geometry.n_inlines);
    cfg.crop_shape = {il, model.input_channels, depth};
    cfg.stride = {std::max<std::size_t>(1, il / 2), 1, std::max<std::size_t>(1, depth / 2)};
  }
  return cfg;
}

TrainFn default_trainer(IterationLogger logger) {
  return [logger](std::span<const TrainingCube> cubes, const TrainConfig& cfg,
                  const ModelConfig& model_cfg) {
    auto trained = std::make_shared<const TrainedModel>(train(cubes, cfg, model_cfg, logger));
    Segmenter s;
    s.model = trained;
    s.predictor = [trained](const NdArray<float>& batch) { return trained->model.predict(batch); };
    return s;
  };
}

Report evaluate_volume(const NdArray<float>& prob, const Cube& cube, const HorizonSet& truth,
                       const ExperimentSetup& setup, HorizonSet* predicted) {
  const auto& g = cube.geometry();
  if (prob.shape() != g.shape()) {
    throw RangeError("probability volume " + shape_to_string(prob.shape()) +
                     " does not match cube " + shape_to_string(g.shape()));
  }
  const auto min_traces = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(setup.min_trace_fraction * static_cast<double>(cube.live_trace_count()))));
  HorizonSet pred = extract_horizons(prob, g, setup.threshold, min_traces);
  const auto matches = match_horizons(pred, truth);

  Report report;
  report.setup = setup;
  for (const auto& m : matches) {
    const Horizon& p = pred.horizons[m.pred];
    const Horizon& t = truth.horizons[m.truth];
    report.rows.push_back(
        {t.name(), p.name(), compare_horizons(p, t, setup.window_ms, g.sample_interval_ms)});
  }
  report.unmatched_pred = pred.size() - matches.size();
  report.unmatched_truth = truth.size() - matches.size();
  if (predicted) *predicted = std::move(pred);
  return report;
}

Report run_experiment(const ExperimentSetup& setup, const DataRegistry& data,
                      const TrainFn& trainer, ExperimentArtifacts* artifacts) {
  const auto start = std::chrono::steady_clock::now();
  setup.validate();
  if (!data.contains(setup.test_cube)) {
    throw ConfigError("unknown cube alias '" + setup.test_cube + "'");
  }

  std::vector<TrainingCube> train_set;
  for (const auto& alias : setup.train_cubes) {
    train_set.push_back({alias, &data.cube(alias), &data.horizons(alias)});
  }
  TrainConfig tcfg = setup.train;
  tcfg.inline_stride = setup.train_inline_stride;
  const Segmenter seg = trainer(train_set, tcfg, setup.model);
  if (!seg.predictor) throw ConfigError("experiment: trainer returned no predictor");

  const Cube& test = data.cube(setup.test_cube);
  const InferenceConfig icfg =
      setup.inference ? *setup.inference
                      : default_inference(test.geometry(), setup.model, setup.train.channel_axis,
                                          setup.train.scaling);
  NdArray<float> prob = predict_volume(seg.predictor, test, icfg);
  if (setup.work_dir) {
    std::filesystem::create_directories(*setup.work_dir);
    save_native(Cube(test.geometry(), prob),
                *setup.work_dir / (setup.test_cube + ".prob.hfc"));
  }

  // Test labels are only looked up once the model is fixed.
  const HorizonSet& truth = data.horizons(setup.test_cube);
  HorizonSet predicted;
  Report report = evaluate_volume(prob, test, truth, setup, &predicted);
  report.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (artifacts) {
    artifacts->model = seg.model;
    artifacts->probability = std::move(prob);
    artifacts->predicted = std::move(predicted);
  }
  return report;
}

std::string format_metric_cells(std::span<const ReportRow> rows) {
  if (rows.empty()) return "—";
  std::vector<std::string> area, error, window;
  for (const auto& r : rows) {
    area.push_back(one_decimal(r.metrics.coverage_pct));
    error.push_back(r.metrics.mean_error_ms ? one_decimal(*r.metrics.mean_error_ms) : "—");
    window.push_back(r.metrics.window_pct ? one_decimal(*r.metrics.window_pct) : "—");
  }
  return join(area, ", ") + " | " + join(error, ", ") + " | " + join(window, ", ");
}

std::string format_report(const Report& report) {
  const auto& s = report.setup;
  const std::string window_col = "Area in " + one_decimal(s.window_ms) + "ms window, %";
  std::string out;
  if (s.same_cube) {
    out += "Train/test cube | Area, % | Mean error, ms | " + window_col + "\n";
    out += s.test_cube + " | ";
  } else {
    out += "Train cube | Test cube | Area, % | Mean error, ms | " + window_col + "\n";
    out += join(s.train_cubes, ", ") + " | " + s.test_cube + " | ";
  }
  out += format_metric_cells(report.rows) + "\n";
  out += "unmatched: predicted " + std::to_string(report.unmatched_pred) + ", truth " +
         std::to_string(report.unmatched_truth) + "\n";
  return out;
}

std::string format_report_csv(const Report& report) {
  std::string out = "horizon,coverage_pct,mean_error_ms,window_pct\n";
  for (const auto& r : report.rows) {
    out += r.truth + "," + csv_value(r.metrics.coverage_pct) + "," +
           csv_value(r.metrics.mean_error_ms) + "," + csv_value(r.metrics.window_pct) + "\n";
  }
  return out;
}

std::vector<std::uint8_t> encode_section_pgm(const Cube& cube, Axis axis, std::size_t index,
                                             const HorizonSet& horizons) {
  const NdArray<float> section = slice_section(cube, axis, index);
  const std::size_t width = section.dim(0), height = section.dim(1);
  const auto [lo, hi] = std::minmax_element(section.data().begin(), section.data().end());
  const double span = static_cast<double>(*hi) - static_cast<double>(*lo);

  std::vector<std::uint8_t> pixels(width * height, 0);
  for (std::size_t col = 0; col < width; ++col) {
    for (std::size_t row = 0; row < height; ++row) {
      const double v = span > 0.0 ? (section(col, row) - static_cast<double>(*lo)) / span : 0.0;
      pixels[row * width + col] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  for (const auto& h : horizons.horizons) {
    if (h.geometry() != cube.geometry()) {
      throw ConfigError("section image: horizon '" + h.name() + "' has another geometry");
    }
    for (std::size_t col = 0; col < width; ++col) {
      const auto d = axis == Axis::Inline ? h.find(index, col) : h.find(col, index);
      if (!d) continue;
      const auto row = static_cast<long long>(std::llround(*d));
      if (row < 0 || row >= static_cast<long long>(height)) continue;
      pixels[static_cast<std::size_t>(row) * width + col] = 255;
    }
  }

  detail::ByteWriter w;
  w.text("P5 " + std::to_string(width) + " " + std::to_string(height) + " 255\n");
  w.bytes(pixels);
  return std::move(w.buffer());
}

void emit_section_image(const Cube& cube, Axis axis, std::size_t index,
                        const HorizonSet& horizons, const std::filesystem::path& path) {
  detail::write_file(path, encode_section_pgm(cube, axis, index, horizons));
}

}  // namespace hseg
