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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hseg/evaluation.hpp"
#include "hseg/model.hpp"
#include "hseg/pipeline.hpp"
#include "hseg/synth.hpp"

namespace hseg {

/// Environment variable that replaces [run] output_dir.
inline constexpr const char* kOutputDirEnv = "HSEG_OUTPUT_DIR";

struct CubeEntry {
  std::string alias;
  std::filesystem::path path;
  std::vector<std::filesystem::path> horizons;
};

/// [synth]: `count` cubes; list-valued keys are cycled over the cubes and
/// cube i uses seed + i.
struct SynthConfig {
  std::size_t count = 1;
  std::string alias_prefix = "synth";
  CubeGeometry geometry{64, 64, 128, 2.0, 0, 0};
  std::size_t n_layers = 4;
  double surface_smoothness = 12.0;
  double relief = 6.0;
  std::vector<std::size_t> fault_count{0};
  double fault_throw = 5.0;
  std::vector<double> wavelet_peak_hz{30.0};
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  std::string alias(std::size_t i) const { return alias_prefix + std::to_string(i); }
  SyntheticSpec spec(std::size_t i) const;
};

struct RunConfig {
  std::filesystem::path source;  // config file, empty for in-memory text
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::vector<CubeEntry> cubes;
  ModelConfig model;
  TrainConfig train;
  /// train/model fields mirror the members above; cube aliases filled from
  /// [experiment] or, with a single cube, same-cube mode on it.
  ExperimentSetup experiment;
  std::optional<SynthConfig> synth;

  const CubeEntry& cube(const std::string& alias) const;
};

/// Parses the bracketed key = value format. Relative paths resolve against
/// base_dir. With check_paths, every referenced cube and horizon file must exist.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                            const std::string& origin = "<config>", bool check_paths = true);

/// Reads and parses a config file; HSEG_OUTPUT_DIR, when set, replaces output_dir.
RunConfig parse_config(const std::filesystem::path& path);

/// Loads every configured cube and its ground truth.
DataRegistry load_registry(const RunConfig& cfg);

}  // namespace hseg
