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
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hseg/cube.hpp"
#include "hseg/horizon.hpp"
#include "hseg/metrics.hpp"
#include "hseg/model.hpp"
#include "hseg/pipeline.hpp"

namespace hseg {

/// Alias -> cube and optional ground truth. Every lookup is appended to the
/// access log so tests can check what a stage touched.
class DataRegistry {
 public:
  void add(const std::string& alias, Cube cube, std::optional<HorizonSet> horizons = std::nullopt);
  bool contains(const std::string& alias) const { return entries_.count(alias) != 0; }
  const Cube& cube(const std::string& alias) const;
  /// Throws ConfigError when the alias is unknown or has no ground truth.
  const HorizonSet& horizons(const std::string& alias) const;
  std::vector<std::string> aliases() const;

  /// Entries of the form "cube:<alias>" / "horizons:<alias>".
  const std::vector<std::string>& access_log() const { return log_; }
  void clear_log() const { log_.clear(); }

 private:
  struct Entry {
    Cube cube;
    std::optional<HorizonSet> horizons;
  };
  const Entry& entry(const std::string& alias) const;

  std::map<std::string, Entry> entries_;
  mutable std::vector<std::string> log_;
};

struct ExperimentSetup {
  std::string name = "experiment";
  std::vector<std::string> train_cubes;
  std::string test_cube;
  bool same_cube = false;
  std::size_t train_inline_stride = 200;
  double window_ms = 5.0;
  TrainConfig train;
  ModelConfig model;
  /// Empty: whole-extent crops rounded down to the model divisor, half-crop stride.
  std::optional<InferenceConfig> inference;
  double threshold = 0.5;
  /// Extracted surfaces must cover at least this share of live traces.
  double min_trace_fraction = 0.02;
  /// When set, the probability volume is written here as <test>.prob.hfc.
  std::optional<std::filesystem::path> work_dir;

  void validate() const;
};

/// Default synthetic-mode train stride: n_inlines / 8, at least 1.
std::size_t synthetic_inline_stride(const CubeGeometry& geometry);

InferenceConfig default_inference(const CubeGeometry& geometry, const ModelConfig& model,
                                  Axis channel_axis, Scaling scaling);

struct ReportRow {
  std::string truth;
  std::string pred;
  MetricRow metrics;
};

struct Report {
  ExperimentSetup setup;
  std::vector<ReportRow> rows;  // truth order
  std::size_t unmatched_pred = 0;
  std::size_t unmatched_truth = 0;
  double runtime_s = 0.0;
};

/// A trained predictor. `model` is empty for injected stubs and oracles.
struct Segmenter {
  std::shared_ptr<const TrainedModel> model;
  BatchPredictor predictor;
};

using TrainFn = std::function<Segmenter(std::span<const TrainingCube>, const TrainConfig&,
                                        const ModelConfig&)>;

/// Trainer backed by pipeline::train.
TrainFn default_trainer(IterationLogger logger = {});

struct ExperimentArtifacts {
  std::shared_ptr<const TrainedModel> model;
  NdArray<float> probability;
  HorizonSet predicted;
};

/// Extraction, matching and metrics for a finished probability volume.
Report evaluate_volume(const NdArray<float>& prob, const Cube& cube, const HorizonSet& truth,
                       const ExperimentSetup& setup, HorizonSet* predicted = nullptr);

/// Train on the train split, predict the test cube, extract, match, score.
Report run_experiment(const ExperimentSetup& setup, const DataRegistry& data,
                      const TrainFn& trainer = default_trainer(),
                      ExperimentArtifacts* artifacts = nullptr);

/// "a, b, c | d, e, f | g, h, i"; one value per row in each group, "—" for an
/// undefined value or an empty row list.
std::string format_metric_cells(std::span<const ReportRow> rows);

/// Text table in the layout of the published result tables (runtime excluded).
std::string format_report(const Report& report);

/// "horizon,coverage_pct,mean_error_ms,window_pct" plus one line per row.
std::string format_report_csv(const Report& report);

/// Binary PGM of one section: columns are traces, rows are depth samples,
/// amplitudes min-max mapped to 0..255, horizons burned in at 255.
void emit_section_image(const Cube& cube, Axis axis, std::size_t index,
                        const HorizonSet& horizons, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_section_pgm(const Cube& cube, Axis axis, std::size_t index,
                                             const HorizonSet& horizons);

}  // namespace hseg
