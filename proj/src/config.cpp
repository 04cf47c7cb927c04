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

#include "hseg/config.hpp"

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "hseg/error.hpp"
#include "hseg/native_format.hpp"

namespace hseg {
namespace {

struct Value {
  std::string text;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, Value> keys;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::set<std::string>& allowed_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"run", {"output_dir", "seed"}},
      {"cube", {"path", "horizons"}},
      {"model", {"depth", "base_channels", "input_channels", "skip_connections"}},
      {"train",
       {"batch_size", "iterations", "base_lr", "lr_decay_rate", "thickness", "channel_axis",
        "shape_policy", "crop_shape", "fraction_low", "fraction_high", "depth_extent", "scaling",
        "cube_choice", "dice_smooth"}},
      {"augment",
       {"additive_std", "multiplicative_low", "multiplicative_high", "rotate_max_deg",
        "shift_max_frac", "scale_low", "scale_high", "perspective_jitter_frac", "elastic_alpha",
        "elastic_sigma", "cutout_count", "cutout_frac", "p_invert", "p_noise", "p_geometric",
        "p_cutout"}},
      {"experiment",
       {"name", "train_cubes", "test_cube", "same_cube", "train_inline_stride", "window_ms",
        "threshold", "min_trace_fraction", "infer_crop_shape", "infer_stride", "infer_batch"}},
      {"synth",
       {"count", "alias_prefix", "n_inlines", "n_crosslines", "n_samples", "sample_interval_ms",
        "inline_origin", "crossline_origin", "n_layers", "surface_smoothness", "relief",
        "fault_count", "fault_throw", "wavelet_peak_hz", "noise_std", "seed"}},
  };
  const auto it = table.find(section);
  static const std::set<std::string> none;
  return it == table.end() ? none : it->second;
}

class Reader {
 public:
  Reader(const Section& s, std::string origin) : s_(s), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const Value& v, const std::string& what) const {
    throw ConfigError(origin_ + ":" + std::to_string(v.line) + ": " + what);
  }
  const Value* find(const std::string& key) const {
    const auto it = s_.keys.find(key);
    return it == s_.keys.end() ? nullptr : &it->second;
  }
  const Value& require(const std::string& key) const {
    if (const Value* v = find(key)) return *v;
    throw ConfigError(origin_ + ":" + std::to_string(s_.line) + ": missing key '" + key +
                      "' in [" + s_.name + "]");
  }

  template <typename T>
  T parse_number(const Value& v) const {
    T out{};
    const char* first = v.text.data();
    const char* last = first + v.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) fail(v, "invalid number '" + v.text + "'");
    return out;
  }

  void get(const std::string& key, std::size_t& out) const {
    if (const Value* v = find(key)) {
      if (!v->text.empty() && v->text[0] == '-') fail(*v, "'" + key + "' must be nonnegative");
      out = parse_number<std::size_t>(*v);
    }
  }
  void get_seed(const std::string& key, std::uint64_t& out) const {
    if (const Value* v = find(key)) out = parse_number<std::uint64_t>(*v);
  }
  void get(const std::string& key, std::int64_t& out) const {
    if (const Value* v = find(key)) out = parse_number<std::int64_t>(*v);
  }
  void get(const std::string& key, double& out) const {
    if (const Value* v = find(key)) out = parse_number<double>(*v);
  }
  void get(const std::string& key, bool& out) const {
    if (const Value* v = find(key)) {
      if (v->text == "true" || v->text == "on" || v->text == "1") {
        out = true;
      } else if (v->text == "false" || v->text == "off" || v->text == "0") {
        out = false;
      } else {
        fail(*v, "expected true/false for '" + key + "'");
      }
    }
  }
  void get(const std::string& key, std::string& out) const {
    if (const Value* v = find(key)) out = v->text;
  }
  void get(const std::string& key, Axis& out) const {
    if (const Value* v = find(key)) {
      try {
        out = parse_axis(v->text);
      } catch (const ConfigError& e) {
        fail(*v, e.what());
      }
    }
  }
  void get(const std::string& key, Triple& out) const {
    if (const Value* v = find(key)) {
      const auto parts = split_list(v->text);
      if (parts.size() != 3) fail(*v, "'" + key + "' needs three comma-separated counts");
      for (int i = 0; i < 3; ++i) out[i] = parse_number<std::size_t>(Value{parts[i], v->line});
    }
  }
  template <typename T>
  void get_list(const std::string& key, std::vector<T>& out) const {
    if (const Value* v = find(key)) {
      out.clear();
      for (const auto& p : split_list(v->text)) out.push_back(parse_number<T>(Value{p, v->line}));
      if (out.empty()) fail(*v, "'" + key + "' needs at least one value");
    }
  }
  void get_names(const std::string& key, std::vector<std::string>& out) const {
    if (const Value* v = find(key)) out = split_list(v->text);
  }

 private:
  const Section& s_;
  std::string origin_;
};

std::vector<Section> tokenize(const std::string& text, const std::string& origin) {
  std::vector<Section> sections;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      const std::string kind = name.substr(0, name.find('.'));
      if (allowed_keys(kind).empty()) fail("unknown section [" + name + "]");
      if (kind == "cube" && (name.size() <= 5 || name[4] != '.')) {
        fail("cube sections are named [cube.<alias>]");
      }
      if (kind != "cube" && name != kind) fail("unknown section [" + name + "]");
      if (!seen.insert(name).second) fail("duplicate section [" + name + "]");
      sections.push_back({name, line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    if (sections.empty()) fail("key outside any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    auto& sec = sections.back();
    const std::string kind = sec.name.substr(0, sec.name.find('.'));
    if (key.empty()) fail("empty key");
    if (!allowed_keys(kind).count(key)) fail("unknown key '" + key + "' in [" + sec.name + "]");
    if (value.empty()) fail("empty value for '" + key + "'");
    if (!sec.keys.emplace(key, Value{value, line_no}).second) fail("duplicate key '" + key + "'");
  }
  return sections;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

Scaling parse_scaling(const Reader& r, const Value& v) {
  if (v.text == "per_crop") return Scaling::PerCrop;
  if (v.text == "cube_range") return Scaling::CubeRange;
  r.fail(v, "unknown scaling '" + v.text + "' (expected per_crop|cube_range)");
}

}  // namespace

SyntheticSpec SynthConfig::spec(std::size_t i) const {
  SyntheticSpec s;
  s.geometry = geometry;
  s.n_layers = n_layers;
  s.surface_smoothness = surface_smoothness;
  s.relief = relief;
  s.fault_count = fault_count[i % fault_count.size()];
  s.fault_throw = fault_throw;
  s.wavelet_peak_hz = wavelet_peak_hz[i % wavelet_peak_hz.size()];
  s.noise_std = noise_std;
  s.seed = seed + i;
  return s;
}

const CubeEntry& RunConfig::cube(const std::string& alias) const {
  for (const auto& c : cubes) {
    if (c.alias == alias) return c;
  }
  throw ConfigError("unknown cube alias '" + alias + "'");
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                            const std::string& origin, bool check_paths) {
  const auto sections = tokenize(text, origin);
  auto find = [&](const std::string& name) -> const Section* {
    for (const auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  };

  RunConfig cfg;
  const Section* run = find("run");
  if (!run) throw ConfigError(origin + ": missing section [run]");
  {
    Reader r(*run, origin);
    cfg.output_dir = resolve(base_dir, r.require("output_dir").text);
    r.get_seed("seed", cfg.seed);
  }

  for (const auto& s : sections) {
    if (s.name.rfind("cube.", 0) != 0) continue;
    Reader r(s, origin);
    CubeEntry e;
    e.alias = s.name.substr(5);
    const Value& path = r.require("path");
    e.path = resolve(base_dir, path.text);
    if (check_paths && !std::filesystem::exists(e.path)) {
      r.fail(path, "cube file '" + e.path.string() + "' does not exist");
    }
    if (const Value* hv = r.find("horizons")) {
      for (const auto& h : split_list(hv->text)) {
        e.horizons.push_back(resolve(base_dir, h));
        if (check_paths && !std::filesystem::exists(e.horizons.back())) {
          r.fail(*hv, "horizon file '" + e.horizons.back().string() + "' does not exist");
        }
      }
    }
    cfg.cubes.push_back(std::move(e));
  }

  if (const Section* s = find("model")) {
    Reader r(*s, origin);
    r.get("depth", cfg.model.depth);
    r.get("base_channels", cfg.model.base_channels);
    r.get("input_channels", cfg.model.input_channels);
    r.get("skip_connections", cfg.model.skip_connections);
  }
  cfg.model.validate();

  TrainConfig& t = cfg.train;
  t.seed = cfg.seed;
  if (const Section* s = find("train")) {
    Reader r(*s, origin);
    r.get("batch_size", t.batch_size);
    r.get("iterations", t.iterations);
    r.get("base_lr", t.base_lr);
    r.get("lr_decay_rate", t.lr_decay_rate);
    r.get("thickness", t.thickness);
    r.get("channel_axis", t.channel_axis);
    r.get("crop_shape", t.shape_policy.fixed_shape);
    r.get("fraction_low", t.shape_policy.low);
    r.get("fraction_high", t.shape_policy.high);
    r.get("depth_extent", t.shape_policy.depth_extent);
    r.get("dice_smooth", t.dice_smooth);
    if (const Value* v = r.find("shape_policy")) {
      if (v->text == "fixed") {
        t.shape_policy.kind = ShapePolicy::Kind::Fixed;
      } else if (v->text == "random") {
        t.shape_policy.kind = ShapePolicy::Kind::Random;
      } else {
        r.fail(*v, "unknown shape_policy '" + v->text + "' (expected fixed|random)");
      }
    }
    if (const Value* v = r.find("scaling")) t.scaling = parse_scaling(r, *v);
    if (const Value* v = r.find("cube_choice")) {
      if (v->text == "uniform") {
        t.cube_choice = CubeChoice::Uniform;
      } else if (v->text == "volume_weighted") {
        t.cube_choice = CubeChoice::VolumeWeighted;
      } else {
        r.fail(*v, "unknown cube_choice '" + v->text + "' (expected uniform|volume_weighted)");
      }
    }
  }
  if (const Section* s = find("augment")) {
    Reader r(*s, origin);
    AugmentConfig& a = t.augment;
    r.get("additive_std", a.additive_std);
    r.get("multiplicative_low", a.multiplicative_low);
    r.get("multiplicative_high", a.multiplicative_high);
    r.get("rotate_max_deg", a.rotate_max_deg);
    r.get("shift_max_frac", a.shift_max_frac);
    r.get("scale_low", a.scale_low);
    r.get("scale_high", a.scale_high);
    r.get("perspective_jitter_frac", a.perspective_jitter_frac);
    r.get("elastic_alpha", a.elastic_alpha);
    r.get("elastic_sigma", a.elastic_sigma);
    r.get("cutout_count", a.cutout_count);
    r.get("cutout_frac", a.cutout_frac);
    r.get("p_invert", a.p_invert);
    r.get("p_noise", a.p_noise);
    r.get("p_geometric", a.p_geometric);
    r.get("p_cutout", a.p_cutout);
  }
  t.validate();

  ExperimentSetup& x = cfg.experiment;
  if (const Section* s = find("experiment")) {
    Reader r(*s, origin);
    r.get("name", x.name);
    r.get_names("train_cubes", x.train_cubes);
    r.get("test_cube", x.test_cube);
    r.get("same_cube", x.same_cube);
    r.get("train_inline_stride", x.train_inline_stride);
    r.get("window_ms", x.window_ms);
    r.get("threshold", x.threshold);
    r.get("min_trace_fraction", x.min_trace_fraction);
    const Value* crop = r.find("infer_crop_shape");
    const Value* stride = r.find("infer_stride");
    if ((crop == nullptr) != (stride == nullptr)) {
      r.fail(crop ? *crop : *stride, "infer_crop_shape and infer_stride go together");
    }
    if (crop) {
      InferenceConfig icfg;
      r.get("infer_crop_shape", icfg.crop_shape);
      r.get("infer_stride", icfg.stride);
      r.get("infer_batch", icfg.windows_per_batch);
      x.inference = icfg;
    } else if (const Value* v = r.find("infer_batch")) {
      r.fail(*v, "infer_batch needs infer_crop_shape");
    }
  }
  if (x.train_cubes.empty() && x.test_cube.empty() && cfg.cubes.size() == 1) {
    x.train_cubes = {cfg.cubes[0].alias};
    x.test_cube = cfg.cubes[0].alias;
    x.same_cube = true;
  }
  x.train = t;
  x.model = cfg.model;
  if (x.inference) {
    x.inference->channel_axis = t.channel_axis;
    x.inference->scaling = t.scaling;
  }
  if (!x.test_cube.empty() || !x.train_cubes.empty()) {
    x.validate();
    if (!cfg.cubes.empty()) {
      for (const auto& alias : x.train_cubes) (void)cfg.cube(alias);
      (void)cfg.cube(x.test_cube);
    }
  }

  std::set<std::string> aliases;
  for (const auto& c : cfg.cubes) aliases.insert(c.alias);

  if (const Section* s = find("synth")) {
    Reader r(*s, origin);
    SynthConfig sc;
    r.get("count", sc.count);
    r.get("alias_prefix", sc.alias_prefix);
    r.get("n_inlines", sc.geometry.n_inlines);
    r.get("n_crosslines", sc.geometry.n_crosslines);
    r.get("n_samples", sc.geometry.n_samples);
    r.get("sample_interval_ms", sc.geometry.sample_interval_ms);
    r.get("inline_origin", sc.geometry.inline_origin);
    r.get("crossline_origin", sc.geometry.crossline_origin);
    r.get("n_layers", sc.n_layers);
    r.get("surface_smoothness", sc.surface_smoothness);
    r.get("relief", sc.relief);
    r.get_list("fault_count", sc.fault_count);
    r.get("fault_throw", sc.fault_throw);
    r.get_list("wavelet_peak_hz", sc.wavelet_peak_hz);
    r.get("noise_std", sc.noise_std);
    sc.seed = cfg.seed;
    r.get_seed("seed", sc.seed);
    if (sc.count < 1) throw ConfigError(origin + ": [synth] count must be >= 1");
    for (std::size_t i = 0; i < sc.count; ++i) sc.spec(i).validate();
    cfg.synth = sc;
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  const std::string text(bytes.begin(), bytes.end());
  RunConfig cfg = parse_config_text(text, path.parent_path(), path.string());
  cfg.source = path;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
  return cfg;
}

DataRegistry load_registry(const RunConfig& cfg) {
  DataRegistry registry;
  for (const auto& e : cfg.cubes) {
    Cube cube = load_native(e.path);
    std::optional<HorizonSet> truth;
    if (!e.horizons.empty()) {
      HorizonSet set;
      for (const auto& h : e.horizons) set.horizons.push_back(load_horizon(h, cube.geometry()));
      truth = std::move(set);
    }
    registry.add(e.alias, std::move(cube), std::move(truth));
  }
  return registry;
}

}  // namespace hseg
