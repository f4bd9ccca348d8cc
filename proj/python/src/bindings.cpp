// SPDX-License-Identifier: Apache-2.0
#include <aoasim/beamforming.hpp>
#include <aoasim/calibration.hpp>
#include <aoasim/error.hpp>
#include <aoasim/experiment.hpp>
#include <aoasim/io.hpp>
#include <aoasim/signal_chain.hpp>
#include <aoasim/superposition_solver.hpp>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

namespace py = pybind11;
using namespace aoasim;

namespace {

py::tuple angle_tuple(const AnglePair& p) { return py::make_tuple(p.azimuth.degrees(), p.elevation.degrees()); }

py::array_t<std::complex<double>> cube_array(const SampleCube& cube) {
  py::array_t<std::complex<double>> out({cube.num_tx(), cube.num_rx(), cube.num_samples()});
  std::memcpy(out.mutable_data(), cube.data().data(), cube.data().size() * sizeof(std::complex<double>));
  return out;
}

SampleCube array_cube(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> a,
                      double sample_rate_hz) {
  if (a.ndim() != 3) throw Error(ErrorCode::dimension_mismatch, "cube must have shape (tx, rx, samples)");
  SampleCube cube(a.shape(0), a.shape(1), a.shape(2), sample_rate_hz);
  std::memcpy(cube.data().data(), a.data(), cube.data().size() * sizeof(std::complex<double>));
  return cube;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Angle-of-arrival superposition simulator";

  static py::exception<Error> error(m, "AoasimError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<ScenarioConfig>(m, "Scenario")
      .def(py::init<>())
      .def_static("from_json", &parse_scenario, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_scenario(path); }, py::arg("path"))
      .def("to_json", [](const ScenarioConfig& s) { return scenario_to_json(s); })
      .def("hash", &scenario_hash)
      .def("diagnostics",
           [](const ScenarioConfig& s, bool closed_form) {
             std::vector<py::tuple> out;
             for (const auto& d : validate_scenario(s, closed_form)) {
               out.push_back(py::make_tuple(d.severity == Severity::error ? "error" : "warning", d.field, d.rule));
             }
             return out;
           },
           py::arg("closed_form") = false)
      .def_property_readonly("front_ends", [](const ScenarioConfig& s) {
        std::vector<py::tuple> out;
        for (const auto& p : s.layout.front_ends) out.push_back(angle_tuple(p));
        return out;
      });

  py::class_<AttenuationSet>(m, "AttenuationSet")
      .def(py::init([](double l, double r, double b, double t) { return AttenuationSet{l, r, b, t, false}; }),
           py::arg("left"), py::arg("right"), py::arg("bottom"), py::arg("top"))
      .def_readonly("left", &AttenuationSet::left)
      .def_readonly("right", &AttenuationSet::right)
      .def_readonly("bottom", &AttenuationSet::bottom)
      .def_readonly("top", &AttenuationSet::top)
      .def_readonly("extrapolated", &AttenuationSet::extrapolated)
      .def("per_channel", &AttenuationSet::per_channel);

  m.def("wavelength", &wavelength, py::arg("frequency_hz"));

  m.def(
      "solve",
      [](double az_deg, double el_deg, const ScenarioConfig& s, const std::string& solver) {
        GridRunConfig c;
        c.layout_mode = LayoutMode::measured;
        c.solver_mode = parse_solver_mode(solver);
        return solve_attenuations({deg(az_deg), deg(el_deg)}, solver_layout(c, s), s.radar);
      },
      py::arg("az_deg"), py::arg("el_deg"), py::arg("scenario") = ScenarioConfig{},
      py::arg("solver") = "reduced-layout");

  m.def(
      "predict_peak",
      [](const AttenuationSet& a, const ScenarioConfig& s, const std::string& solver) {
        GridRunConfig c;
        c.layout_mode = LayoutMode::measured;
        c.solver_mode = parse_solver_mode(solver);
        return angle_tuple(predict_peak(a, solver_layout(c, s), s.radar));
      },
      py::arg("attens"), py::arg("scenario") = ScenarioConfig{}, py::arg("solver") = "reduced-layout");

  m.def(
      "synthesize",
      [](const ScenarioConfig& s, std::optional<AttenuationSet> a) {
        return cube_array(synthesize_cube(a ? with_attenuations(s, a->per_channel()) : s));
      },
      py::arg("scenario") = ScenarioConfig{}, py::arg("attens") = std::nullopt);

  m.def(
      "estimate",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> cube,
         const ScenarioConfig& s) {
        const auto peak = extract_peak_bin(
            range_dft(array_cube(cube, s.radar.effective_sample_rate()), s.processing.window));
        const auto est = estimate_angle(beamform_direct(peak.values, s.radar, s.processing.grid));
        py::dict out;
        out["range_bin"] = peak.bin;
        out["azimuth_deg"] = est.azimuth.degrees();
        out["elevation_deg"] = est.elevation.degrees();
        out["peak_magnitude"] = est.peak_magnitude;
        out["on_boundary"] = est.on_boundary;
        return out;
      },
      py::arg("cube"), py::arg("scenario") = ScenarioConfig{});

  m.def(
      "calibrate",
      [](const ScenarioConfig& s, std::optional<std::uint64_t> inject_seed) {
        ScenarioConfig sim = s;
        if (inject_seed) {
          GridRunConfig c;
          c.layout_mode = LayoutMode::measured;
          c.inject_phase_offsets = true;
          c.seed = *inject_seed;
          sim = grid_scenario(c, s);
        }
        const auto r = calibrate(sim);
        py::dict out;
        out["delay_offsets_s"] = r.table.delay_offsets_s;
        out["gains"] = r.table.gains;
        out["residual_coherency_deg"] = r.residual_coherency_rad * 180.0 / kPi;
        return out;
      },
      py::arg("scenario") = ScenarioConfig{}, py::arg("inject_seed") = std::nullopt);

  m.def(
      "run_grid",
      [](const ScenarioConfig& s, std::vector<double> azs, std::vector<double> els, const std::string& layout,
         const std::string& solver, std::uint64_t seed, bool inject_phases, std::size_t threads) {
        GridRunConfig c;
        c.azimuths_deg = std::move(azs);
        c.elevations_deg = std::move(els);
        c.layout_mode = parse_layout_mode(layout);
        c.solver_mode = parse_solver_mode(solver);
        c.seed = seed;
        c.inject_phase_offsets = inject_phases;
        c.threads = threads;
        GridRunResult result;
        {
          py::gil_scoped_release release;
          result = run_grid(c, s);
        }
        std::vector<py::dict> rows;
        for (const auto& r : result.runs) {
          py::dict row;
          row["set_point"] = angle_tuple(r.set_point);
          row["attens"] = r.attens;
          row["status"] = r.status;
          if (r.estimate) {
            row["estimate"] = angle_tuple({r.estimate->azimuth, r.estimate->elevation});
            row["error"] = py::make_tuple(r.estimate->azimuth_error.degrees(), r.estimate->elevation_error.degrees());
          }
          if (r.predicted) row["predicted"] = angle_tuple(*r.predicted);
          rows.push_back(std::move(row));
        }
        return rows;
      },
      py::arg("scenario"), py::arg("azimuths_deg"), py::arg("elevations_deg"), py::arg("layout") = "ideal",
      py::arg("solver") = "reduced-layout", py::arg("seed") = 1, py::arg("inject_phases") = false,
      py::arg("threads") = 0);
}
