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

#include "hseg/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>

#include "binary_io.hpp"
#include "hseg/config.hpp"
#include "hseg/error.hpp"
#include "hseg/evaluation.hpp"
#include "hseg/extract.hpp"
#include "hseg/native_format.hpp"
#include "hseg/segy.hpp"
#include "hseg/synth.hpp"

namespace hseg {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

// Appends one line per iteration, flushed so long runs can be followed.
class TrainLog {
 public:
  explicit TrainLog(const fs::path& path) {
    fs::create_directories(path.parent_path());
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw IoError("cannot write " + path.string());
  }
  IterationLogger logger() {
    return [this](std::size_t iter, double lr, double loss) {
      file_ << format_log_line(iter, lr, loss) << '\n' << std::flush;
      if (!file_) throw IoError("train.log: write failed");
    };
  }

 private:
  std::ofstream file_;
};

std::string synth_manifest(const RunConfig& cfg, const SynthConfig& sc,
                           const std::vector<std::vector<std::string>>& horizon_files) {
  std::string m = "# Written by `hseg synth`; paths are relative to this file.\n[run]\n";
  m += "output_dir = .\nseed = " + std::to_string(cfg.seed) + "\n";
  for (std::size_t i = 0; i < sc.count; ++i) {
    m += "\n[cube." + sc.alias(i) + "]\npath = " + sc.alias(i) + ".hfc\nhorizons = ";
    for (std::size_t k = 0; k < horizon_files[i].size(); ++k) {
      m += (k ? ", " : "") + horizon_files[i][k];
    }
    m += "\n";
  }
  // Train crops: one inline, at most 128 x 128, cut to the default model divisor.
  const std::size_t div = ModelConfig{}.divisor();
  auto extent = [div](std::size_t n) { return std::max(div, std::min<std::size_t>(128, n) / div * div); };
  m += "\n[train]\ncrop_shape = 1, " + std::to_string(extent(sc.geometry.n_crosslines)) + ", " +
       std::to_string(extent(sc.geometry.n_samples)) + "\n";
  m += "\n[experiment]\n";
  if (sc.count == 1) {
    m += "train_cubes = " + sc.alias(0) + "\ntest_cube = " + sc.alias(0) + "\nsame_cube = true\n";
  } else {
    m += "train_cubes = ";
    for (std::size_t i = 0; i + 1 < sc.count; ++i) m += (i ? ", " : "") + sc.alias(i);
    m += "\ntest_cube = " + sc.alias(sc.count - 1) + "\n";
  }
  m += "train_inline_stride = " + std::to_string(synthetic_inline_stride(sc.geometry)) + "\n";
  return m;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.synth) throw ConfigError("synth: config has no [synth] section");
  const SynthConfig& sc = *cfg.synth;
  fs::create_directories(cfg.output_dir);
  std::vector<std::vector<std::string>> files(sc.count);
  for (std::size_t i = 0; i < sc.count; ++i) {
    const SyntheticCube syn = synthesize_cube(sc.spec(i));
    const std::string alias = sc.alias(i);
    save_native(syn.cube, cfg.output_dir / (alias + ".hfc"));
    fs::create_directories(cfg.output_dir / alias);
    for (const auto& h : syn.horizons.horizons) {
      const std::string rel = alias + "/" + h.name() + ".txt";
      save_horizon(h, cfg.output_dir / rel);
      files[i].push_back(rel);
    }
    out << "wrote " << alias << ".hfc with " << syn.horizons.size() << " horizons\n";
  }
  write_text(cfg.output_dir / "manifest.cfg", synth_manifest(cfg, sc, files));
  out << "wrote manifest.cfg\n";
  return kExitOk;
}

int cmd_ingest(const RunConfig& cfg, const fs::path& segy, const std::string& alias,
               const SegyHeaderSpec& spec, std::ostream& out) {
  const Cube cube = ingest_segy(segy, spec);
  fs::create_directories(cfg.output_dir);
  save_native(cube, cfg.output_dir / (alias + ".hfc"));
  const auto& g = cube.geometry();
  out << "wrote " << alias << ".hfc (" << g.n_inlines << " x " << g.n_crosslines << " x "
      << g.n_samples << ", " << cube.live_trace_count() << " live traces)\n";
  return kExitOk;
}

std::vector<TrainingCube> training_set(const RunConfig& cfg, const DataRegistry& data) {
  std::vector<TrainingCube> set;
  for (const auto& alias : cfg.experiment.train_cubes) {
    set.push_back({alias, &data.cube(alias), &data.horizons(alias)});
  }
  if (set.empty()) throw ConfigError("train: no train cubes configured");
  return set;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const DataRegistry data = load_registry(cfg);
  const auto set = training_set(cfg, data);
  TrainConfig tcfg = cfg.train;
  tcfg.inline_stride = cfg.experiment.train_inline_stride;
  TrainLog log(cfg.output_dir / "train.log");
  const TrainedModel model = train(set, tcfg, cfg.model, log.logger());
  save_checkpoint(model, cfg.output_dir / "model.hfw");
  out << "trained " << model.loss_history.size() << " iterations, final loss "
      << model.loss_history.back() << "\nwrote model.hfw, train.log\n";
  return kExitOk;
}

InferenceConfig inference_for(const RunConfig& cfg, const CubeGeometry& g,
                              const ModelConfig& model) {
  return cfg.experiment.inference
             ? *cfg.experiment.inference
             : default_inference(g, model, cfg.train.channel_axis, cfg.train.scaling);
}

int cmd_predict(const RunConfig& cfg, const std::string& model_path, std::string alias,
                std::ostream& out) {
  const TrainedModel model =
      load_checkpoint(model_path.empty() ? cfg.output_dir / "model.hfw" : fs::path(model_path));
  if (alias.empty()) alias = cfg.experiment.test_cube;
  const Cube cube = load_native(cfg.cube(alias).path);
  const NdArray<float> prob = predict_volume(
      as_predictor(model.model), cube, inference_for(cfg, cube.geometry(), model.model.config()));
  fs::create_directories(cfg.output_dir);
  save_native(Cube(cube.geometry(), prob), cfg.output_dir / (alias + ".prob.hfc"));
  out << "wrote " << alias << ".prob.hfc\n";
  return kExitOk;
}

void write_report(const RunConfig& cfg, const Report& report, std::ostream& out) {
  const std::string table = format_report(report);
  write_text(cfg.output_dir / "report.txt", table);
  write_text(cfg.output_dir / "report.csv", format_report_csv(report));
  char runtime[64];
  std::snprintf(runtime, sizeof runtime, "runtime: %.1f s\n", report.runtime_s);
  out << table << runtime << "wrote report.txt, report.csv\n";
}

int cmd_evaluate(const RunConfig& cfg, const std::string& prob_path, std::ostream& out) {
  const DataRegistry data = load_registry(cfg);
  ExperimentSetup setup = cfg.experiment;
  fs::create_directories(cfg.output_dir);
  if (!prob_path.empty()) {
    const Cube prob = load_native(prob_path);
    const Cube& test = data.cube(setup.test_cube);
    if (prob.geometry() != test.geometry()) {
      throw ConfigError("evaluate: '" + prob_path + "' does not match cube '" +
                        setup.test_cube + "' geometry");
    }
    Report report = evaluate_volume(prob.values(), test, data.horizons(setup.test_cube), setup);
    write_report(cfg, report, out);
    return kExitOk;
  }
  setup.work_dir = cfg.output_dir;
  TrainLog log(cfg.output_dir / "train.log");
  ExperimentArtifacts artifacts;
  const Report report = run_experiment(setup, data, default_trainer(log.logger()), &artifacts);
  save_checkpoint(*artifacts.model, cfg.output_dir / "model.hfw");
  write_report(cfg, report, out);
  out << "wrote model.hfw, train.log, " << setup.test_cube << ".prob.hfc\n";
  return kExitOk;
}

int cmd_render(const RunConfig& cfg, const std::string& alias, const std::string& axis_text,
               std::size_t index, const std::string& prob_path, std::ostream& out) {
  const Axis axis = parse_axis(axis_text);
  const CubeEntry& entry = cfg.cube(alias);
  const Cube cube = load_native(entry.path);
  HorizonSet horizons;
  if (!prob_path.empty()) {
    const Cube prob = load_native(prob_path);
    if (prob.geometry() != cube.geometry()) {
      throw ConfigError("render: '" + prob_path + "' does not match cube '" + alias + "'");
    }
    const auto min_traces = std::max<std::size_t>(
        1, static_cast<std::size_t>(cfg.experiment.min_trace_fraction *
                                    static_cast<double>(cube.live_trace_count())));
    horizons = extract_horizons(prob.values(), cube.geometry(), cfg.experiment.threshold,
                                min_traces);
  } else {
    for (const auto& h : entry.horizons) horizons.horizons.push_back(load_horizon(h, cube.geometry()));
  }
  fs::create_directories(cfg.output_dir);
  const std::string name = alias + "_" + axis_name(axis) + "_" + std::to_string(index) + ".pgm";
  emit_section_image(cube, axis, index, horizons, cfg.output_dir / name);
  out << "wrote " << name << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seismic horizon segmentation toolkit", args.empty() ? "hseg" : args[0]};
  app.require_subcommand(1);
  std::string config;
  auto add_config = [&config](CLI::App* sub) {
    sub->add_option("-c,--config", config, "Run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
  };

  auto* synth = app.add_subcommand("synth", "Generate synthetic cubes and a manifest");
  add_config(synth);

  auto* ingest = app.add_subcommand("ingest", "Convert a SEG-Y file to the native format");
  add_config(ingest);
  std::string segy, alias;
  SegyHeaderSpec header;
  ingest->add_option("--segy", segy, "SEG-Y file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--alias", alias, "Name of the written cube")->required();
  ingest->add_option("--inline-byte", header.inline_byte, "1-based inline header byte");
  ingest->add_option("--crossline-byte", header.crossline_byte, "1-based crossline header byte");

  auto* train_cmd = app.add_subcommand("train", "Train a model on the configured train cubes");
  add_config(train_cmd);

  auto* predict = app.add_subcommand("predict", "Write a probability volume for one cube");
  add_config(predict);
  std::string model_path, cube_alias;
  predict->add_option("--model", model_path, "Checkpoint (default <output_dir>/model.hfw)");
  predict->add_option("--cube", cube_alias, "Cube alias (default: experiment test cube)");

  auto* evaluate = app.add_subcommand("evaluate", "Run the experiment and write the report");
  add_config(evaluate);
  std::string prob_path;
  evaluate->add_option("--prob", prob_path, "Score an existing probability volume instead")
      ->check(CLI::ExistingFile);

  auto* render = app.add_subcommand("render", "Write a section image as binary PGM");
  add_config(render);
  std::string render_alias, axis = "inline";
  std::size_t index = 0;
  render->add_option("--cube", render_alias, "Cube alias")->required();
  render->add_option("--axis", axis, "inline or crossline");
  render->add_option("--index", index, "Section index")->required();
  render->add_option("--prob", prob_path, "Burn in horizons extracted from this volume")
      ->check(CLI::ExistingFile);

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "hseg: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    const RunConfig cfg = parse_config(config);
    if (synth->parsed()) return cmd_synth(cfg, out);
    if (ingest->parsed()) return cmd_ingest(cfg, segy, alias, header, out);
    if (train_cmd->parsed()) return cmd_train(cfg, out);
    if (predict->parsed()) return cmd_predict(cfg, model_path, cube_alias, out);
    if (evaluate->parsed()) return cmd_evaluate(cfg, prob_path, out);
    return cmd_render(cfg, render_alias, axis, index, prob_path, out);
  } catch (const Error& e) {
    err << "hseg: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const fs::filesystem_error& e) {
    err << "hseg: " << e.what() << "\n";
    return kExitDomainError;
  }
}

}  // namespace hseg
