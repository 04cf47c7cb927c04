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

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "hseg/cli.hpp"
#include "hseg/error.hpp"
#include "hseg/evaluation.hpp"
#include "hseg/extract.hpp"
#include "hseg/mask.hpp"
#include "hseg/native_format.hpp"
#include "hseg/segy.hpp"
#include "hseg/synth.hpp"

namespace py = pybind11;
using namespace hseg;

namespace {

template <typename T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename T>
NdArray<T> to_ndarray(const CArray<T>& a) {
  Shape shape(a.shape(), a.shape() + a.ndim());
  NdArray<T> out(shape);
  std::memcpy(out.raw(), a.data(), out.size() * sizeof(T));
  return out;
}

template <typename T>
py::array_t<T> to_numpy(const NdArray<T>& a) {
  py::array_t<T> out(std::vector<py::ssize_t>(a.shape().begin(), a.shape().end()));
  std::memcpy(out.mutable_data(), a.raw(), a.size() * sizeof(T));
  return out;
}

// Depth map (n_inlines, n_crosslines), NaN for holes.
Horizon horizon_from_depths(const CubeGeometry& g, const std::string& name,
                            const CArray<double>& depths) {
  if (depths.ndim() != 2 || static_cast<std::size_t>(depths.shape(0)) != g.n_inlines ||
      static_cast<std::size_t>(depths.shape(1)) != g.n_crosslines) {
    throw RangeError("horizon depths must have shape (n_inlines, n_crosslines)");
  }
  Horizon h(g, name);
  const double* d = depths.data();
  for (std::size_t il = 0; il < g.n_inlines; ++il) {
    for (std::size_t xl = 0; xl < g.n_crosslines; ++xl) {
      const double v = d[il * g.n_crosslines + xl];
      if (!std::isnan(v)) h.set(il, xl, v);
    }
  }
  return h;
}

py::array_t<double> horizon_depths(const Horizon& h) {
  const auto& g = h.geometry();
  py::array_t<double> out({g.n_inlines, g.n_crosslines});
  std::memcpy(out.mutable_data(), h.depths().data(), h.depths().size() * sizeof(double));
  return out;
}

HorizonSet to_set(const std::vector<Horizon>& list) {
  HorizonSet s;
  s.horizons = list;
  return s;
}

py::dict metric_dict(const MetricRow& m) {
  py::dict d;
  d["coverage_pct"] = m.coverage_pct;
  d["mean_error_ms"] = m.mean_error_ms ? py::cast(*m.mean_error_ms) : py::none();
  d["window_pct"] = m.window_pct ? py::cast(*m.window_pct) : py::none();
  return d;
}

Axis axis_arg(const std::string& s) { return parse_axis(s); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Seismic horizon segmentation core";

  auto base = py::register_exception<Error>(m, "HsegError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<OverlapError>(m, "OverlapError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  py::class_<CubeGeometry>(m, "Geometry")
      .def(py::init([](std::size_t ni, std::size_t nx, std::size_t ns, double dt,
                       std::int64_t il0, std::int64_t xl0) {
             CubeGeometry g{ni, nx, ns, dt, il0, xl0};
             g.validate();
             return g;
           }),
           py::arg("n_inlines"), py::arg("n_crosslines"), py::arg("n_samples"),
           py::arg("sample_interval_ms") = 2.0, py::arg("inline_origin") = 0,
           py::arg("crossline_origin") = 0)
      .def_readonly("n_inlines", &CubeGeometry::n_inlines)
      .def_readonly("n_crosslines", &CubeGeometry::n_crosslines)
      .def_readonly("n_samples", &CubeGeometry::n_samples)
      .def_readonly("sample_interval_ms", &CubeGeometry::sample_interval_ms)
      .def_readonly("inline_origin", &CubeGeometry::inline_origin)
      .def_readonly("crossline_origin", &CubeGeometry::crossline_origin)
      .def_property_readonly("shape",
                             [](const CubeGeometry& g) {
                               return py::make_tuple(g.n_inlines, g.n_crosslines, g.n_samples);
                             })
      .def("__eq__", [](const CubeGeometry& a, const CubeGeometry& b) { return a == b; });

  py::class_<Cube>(m, "Cube")
      .def(py::init([](const CArray<float>& values, double dt, std::int64_t il0, std::int64_t xl0,
                       std::optional<CArray<std::uint8_t>> presence) {
             if (values.ndim() != 3) throw RangeError("cube values must be 3-D");
             CubeGeometry g{static_cast<std::size_t>(values.shape(0)),
                            static_cast<std::size_t>(values.shape(1)),
                            static_cast<std::size_t>(values.shape(2)), dt, il0, xl0};
             std::vector<std::uint8_t> live;
             if (presence) {
               live.assign(presence->data(), presence->data() + presence->size());
             }
             return Cube(g, to_ndarray(values), std::move(live));
           }),
           py::arg("values"), py::arg("sample_interval_ms") = 2.0, py::arg("inline_origin") = 0,
           py::arg("crossline_origin") = 0, py::arg("presence") = py::none())
      .def_property_readonly("geometry", &Cube::geometry)
      .def_property_readonly("values", [](const Cube& c) { return to_numpy(c.values()); })
      .def_property_readonly("presence",
                             [](const Cube& c) {
                               const auto& g = c.geometry();
                               py::array_t<std::uint8_t> out({g.n_inlines, g.n_crosslines});
                               std::memcpy(out.mutable_data(), c.presence().data(),
                                           c.presence().size());
                               return out;
                             })
      .def_property_readonly("live_trace_count", &Cube::live_trace_count)
      .def("__eq__", [](const Cube& a, const Cube& b) { return a == b; });

  py::class_<Horizon>(m, "Horizon")
      .def(py::init(&horizon_from_depths), py::arg("geometry"), py::arg("name"),
           py::arg("depths"))
      .def_property_readonly("name", &Horizon::name)
      .def_property_readonly("geometry", &Horizon::geometry)
      .def_property_readonly("depths", &horizon_depths)
      .def_property_readonly("coverage", &Horizon::coverage)
      .def("__repr__", [](const Horizon& h) {
        return "<Horizon " + h.name() + ", " + std::to_string(h.coverage()) + " traces>";
      });

  m.def("load_native", &load_native, py::arg("path"));
  m.def("save_native", &save_native, py::arg("cube"), py::arg("path"));
  m.def(
      "ingest_segy",
      [](const std::filesystem::path& p, int inline_byte, int crossline_byte) {
        return ingest_segy(p, SegyHeaderSpec{inline_byte, crossline_byte});
      },
      py::arg("path"), py::arg("inline_byte") = 189, py::arg("crossline_byte") = 193);
  m.def(
      "write_segy",
      [](const Cube& c, const std::filesystem::path& p, const std::string& format) {
        if (format != "ieee" && format != "ibm") throw ConfigError("format must be ieee or ibm");
        write_segy(c, p, format == "ibm" ? SegySampleFormat::IbmFloat : SegySampleFormat::IeeeFloat);
      },
      py::arg("cube"), py::arg("path"), py::arg("format") = "ieee");
  m.def("ibm_to_ieee", &ibm_to_ieee, py::arg("bits"));
  m.def("ieee_to_ibm", &ieee_to_ibm, py::arg("value"));
  m.def("load_horizon", &load_horizon, py::arg("path"), py::arg("geometry"));
  m.def("save_horizon", &save_horizon, py::arg("horizon"), py::arg("path"));

  m.def(
      "synthesize",
      [](std::size_t ni, std::size_t nx, std::size_t ns, double dt, std::size_t n_layers,
         double relief, std::size_t fault_count, double fault_throw, double wavelet_peak_hz,
         double noise_std, std::uint64_t seed) {
        SyntheticSpec s;
        s.geometry = {ni, nx, ns, dt, 0, 0};
        s.n_layers = n_layers;
        s.relief = relief;
        s.fault_count = fault_count;
        s.fault_throw = fault_throw;
        s.wavelet_peak_hz = wavelet_peak_hz;
        s.noise_std = noise_std;
        s.seed = seed;
        SyntheticCube syn = synthesize_cube(s);
        return py::make_tuple(std::move(syn.cube), std::move(syn.horizons.horizons));
      },
      py::arg("n_inlines") = 64, py::arg("n_crosslines") = 64, py::arg("n_samples") = 128,
      py::arg("sample_interval_ms") = 2.0, py::arg("n_layers") = 4, py::arg("relief") = 6.0,
      py::arg("fault_count") = 0, py::arg("fault_throw") = 5.0,
      py::arg("wavelet_peak_hz") = 30.0, py::arg("noise_std") = 0.0, py::arg("seed") = 0,
      "Returns (cube, horizons) for a layered synthetic volume.");

  m.def(
      "rasterize_mask",
      [](const CubeGeometry& g, const std::vector<Horizon>& horizons, std::size_t thickness) {
        return to_numpy(rasterize_mask(to_set(horizons), full_window(g), thickness));
      },
      py::arg("geometry"), py::arg("horizons"), py::arg("thickness") = 3);
  m.def(
      "extract_horizons",
      [](const CArray<float>& prob, const CubeGeometry& g, double threshold,
         std::size_t min_traces) {
        return extract_horizons(to_ndarray(prob), g, threshold, min_traces).horizons;
      },
      py::arg("prob"), py::arg("geometry"), py::arg("threshold") = 0.5, py::arg("min_traces") = 1);
  m.def(
      "compare_horizons",
      [](const Horizon& pred, const Horizon& truth, double window_ms) {
        return metric_dict(
            compare_horizons(pred, truth, window_ms, truth.geometry().sample_interval_ms));
      },
      py::arg("pred"), py::arg("truth"), py::arg("window_ms") = 5.0);
  m.def(
      "match_horizons",
      [](const std::vector<Horizon>& pred, const std::vector<Horizon>& truth) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& mt : match_horizons(to_set(pred), to_set(truth))) {
          out.emplace_back(mt.pred, mt.truth);
        }
        return out;
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "dice_loss",
      [](const CArray<double>& pred, const CArray<double>& target, double smooth) {
        nn::Tape<double> tape;
        const auto v = nn::dice_loss(tape, tape.leaf(to_ndarray(pred), false),
                                     to_ndarray(target), smooth);
        return tape.value(v)[0];
      },
      py::arg("pred"), py::arg("target"), py::arg("smooth") = 1.0);

  py::class_<TrainedModel, std::shared_ptr<TrainedModel>>(m, "TrainedModel")
      .def_readonly("loss_history", &TrainedModel::loss_history)
      .def_readonly("train_cubes", &TrainedModel::train_cubes)
      .def_readonly("seed", &TrainedModel::seed)
      .def_property_readonly("parameter_count",
                             [](const TrainedModel& t) { return t.model.parameter_count(); })
      .def("save", [](const TrainedModel& t, const std::filesystem::path& p) {
        save_checkpoint(t, p);
      })
      .def("checkpoint_bytes",
           [](const TrainedModel& t) {
             const auto b = encode_checkpoint(t);
             return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
           })
      .def_static("load", [](const std::filesystem::path& p) {
        return std::make_shared<TrainedModel>(load_checkpoint(p));
      })
      .def(
          "predict_volume",
          [](const TrainedModel& t, const Cube& cube, std::optional<Triple> crop,
             std::optional<Triple> stride, const std::string& axis) {
            InferenceConfig cfg =
                default_inference(cube.geometry(), t.model.config(), axis_arg(axis),
                                  Scaling::PerCrop);
            if (crop) cfg.crop_shape = *crop;
            if (stride) cfg.stride = *stride;
            NdArray<float> out;
            {
              py::gil_scoped_release release;
              out = predict_volume(as_predictor(t.model), cube, cfg);
            }
            return to_numpy(out);
          },
          py::arg("cube"), py::arg("crop_shape") = py::none(), py::arg("stride") = py::none(),
          py::arg("channel_axis") = "inline");

  m.def(
      "train",
      [](const std::vector<std::tuple<std::string, Cube, std::vector<Horizon>>>& cubes,
         std::size_t iterations, std::size_t batch_size, Triple crop_shape, std::uint64_t seed,
         double base_lr, std::size_t inline_stride, std::size_t thickness, bool augment,
         std::size_t depth, std::size_t base_channels, const std::string& channel_axis) {
        std::vector<HorizonSet> sets;
        for (const auto& c : cubes) sets.push_back(to_set(std::get<2>(c)));
        std::vector<TrainingCube> train_set;
        for (std::size_t i = 0; i < cubes.size(); ++i) {
          train_set.push_back({std::get<0>(cubes[i]), &std::get<1>(cubes[i]), &sets[i]});
        }
        TrainConfig cfg;
        cfg.iterations = iterations;
        cfg.batch_size = batch_size;
        cfg.shape_policy.fixed_shape = crop_shape;
        cfg.seed = seed;
        cfg.base_lr = base_lr;
        cfg.inline_stride = inline_stride;
        cfg.thickness = thickness;
        cfg.channel_axis = axis_arg(channel_axis);
        if (!augment) cfg.augment = AugmentConfig::disabled();
        ModelConfig mc;
        mc.depth = depth;
        mc.base_channels = base_channels;
        py::gil_scoped_release release;
        return std::make_shared<TrainedModel>(hseg::train(train_set, cfg, mc));
      },
      py::arg("cubes"), py::arg("iterations") = 1000, py::arg("batch_size") = 64,
      py::arg("crop_shape") = Triple{1, 128, 128}, py::arg("seed") = 0,
      py::arg("base_lr") = 1e-3, py::arg("inline_stride") = 1, py::arg("thickness") = 3,
      py::arg("augment") = true, py::arg("depth") = 3, py::arg("base_channels") = 16,
      py::arg("channel_axis") = "inline",
      "Train on a list of (alias, cube, horizons) tuples.");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "hseg");
        std::ostringstream out, err;
        const int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run an hseg subcommand; returns (exit_code, stdout, stderr).");
}
