// SPDX-License-Identifier: Apache-2.0
#include <aoasim/beamforming.hpp>
#include <aoasim/calibration.hpp>
#include <aoasim/error.hpp>
#include <aoasim/experiment.hpp>
#include <aoasim/io.hpp>
#include <aoasim/signal_chain.hpp>
#include <aoasim/superposition_solver.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <random>

using namespace aoasim;
using nlohmann::json;

namespace {

ScenarioConfig load(const std::string& path) { return path.empty() ? ScenarioConfig{} : load_scenario(path); }

json angle_json(const AnglePair& p) { return {{"azimuth_deg", p.azimuth.degrees()}, {"elevation_deg", p.elevation.degrees()}}; }

ReducedLayout solver_for(const ScenarioConfig& s, const std::string& mode) {
  GridRunConfig c;
  c.layout_mode = LayoutMode::measured;
  c.solver_mode = parse_solver_mode(mode);
  return solver_layout(c, s);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot write " + path);
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Angle-of-arrival superposition simulator for radar target stimulators"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string scenario_path;
  app.add_option("--scenario", scenario_path, "Scenario JSON file (defaults to the bench scenario)");

  // solve
  auto* solve = app.add_subcommand("solve", "Attenuations that place the superimposed peak at a target angle");
  double az = 0.0, el = 0.0;
  std::string solver_mode = "reduced-layout";
  solve->add_option("--az", az, "Target azimuth in degrees")->required();
  solve->add_option("--el", el, "Target elevation in degrees")->required();
  solve->add_option("--solver", solver_mode, "reduced-layout or ideal-square");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Analytic superposition peak for attenuation sets");
  std::string attens_path;
  oracle->add_option("--attens", attens_path, "Attenuation JSON: one set or a list")->required();
  oracle->add_option("--solver", solver_mode, "reduced-layout or ideal-square");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Pairwise delay sweeps and the resulting calibration table");
  std::uint64_t seed = 1;
  bool inject = false;
  std::string sweep_csv, table_path;
  SweepSettings sweep;
  cal->add_flag("--inject-phases", inject, "Draw random hidden channel phases from --seed first");
  cal->add_option("--seed", seed, "Seed for the hidden phases");
  cal->add_option("--steps", sweep.steps, "Points per sweep");
  cal->add_option("--span", sweep.span_s, "Half-width of the sweep in seconds (0 = one wrap period)");
  cal->add_option("--sweep-csv", sweep_csv, "Write the sweep curves to this CSV file");
  cal->add_option("--table", table_path, "Write the calibration table JSON here instead of stdout");

  // grid
  auto* grid = app.add_subcommand("grid", "Full-chain runs over the set-point grid");
  std::string out_dir = "grid_out", layout_mode = "ideal", grid_solver = "reduced-layout";
  double amp_sigma = 0.0;
  std::size_t threads = 0;
  std::vector<double> azs, els;
  grid->add_option("--out", out_dir, "Output directory for runs.csv, summary.csv and manifest.json");
  grid->add_option("--layout", layout_mode, "ideal or measured");
  grid->add_option("--solver", grid_solver, "reduced-layout or ideal-square");
  grid->add_option("--seed", seed, "Seed for injected imperfections");
  grid->add_flag("--inject-phases", inject, "Inject random hidden channel phases and calibrate first");
  grid->add_option("--amplitude-sigma-db", amp_sigma, "Std. dev. of random channel gain errors in dB");
  grid->add_option("--threads", threads, "Worker threads (0 = all cores)");
  grid->add_option("--az", azs, "Azimuth set points in degrees");
  grid->add_option("--el", els, "Elevation set points in degrees");

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize a sample cube");
  std::string cube_path;
  synth->add_option("--out", cube_path, "Cube file to write")->required();
  synth->add_option("--attens", attens_path, "Optional attenuation set applied to the channels");

  // beam
  auto* beam = app.add_subcommand("beam", "Range DFT, detection, beamforming and angle estimate of a cube");
  std::string beam_csv;
  beam->add_option("--cube", cube_path, "Cube file to read")->required();
  beam->add_option("--csv", beam_csv, "Write the beam spectrum to this CSV file");

  // validate
  auto* validate = app.add_subcommand("validate", "List scenario diagnostics");
  bool closed_form = false;
  validate->add_flag("--closed-form", closed_form, "Also check the closed-form spacing constraints");

  CLI11_PARSE(app, argc, argv);

  try {
    const ScenarioConfig scenario = load(scenario_path);

    if (*solve) {
      const TargetAngle t{deg(az), deg(el)};
      const auto layout = solver_for(scenario, solver_mode);
      const auto a = solve_attenuations(t, layout, scenario.radar);
      json out = {{"target", angle_json(t)},
                  {"solver", solver_mode},
                  {"attenuations", json::parse(attenuation_json(a))},
                  {"predicted", angle_json(predict_peak(a, layout, scenario.radar))}};
      std::cout << out.dump(2) << '\n';
    } else if (*oracle) {
      const auto layout = solver_for(scenario, solver_mode);
      json out = json::array();
      for (const auto& a : parse_attenuations(read_text_file(attens_path))) {
        out.push_back({{"attenuations", json::parse(attenuation_json(a))},
                       {"predicted", angle_json(predict_peak(a, layout, scenario.radar))}});
      }
      std::cout << out.dump(2) << '\n';
    } else if (*cal) {
      ScenarioConfig s = scenario;
      if (inject) {
        GridRunConfig c;
        c.layout_mode = LayoutMode::measured;
        c.inject_phase_offsets = true;
        c.seed = seed;
        s = grid_scenario(c, scenario);
      }
      const auto result = calibrate(s, sweep);
      if (!sweep_csv.empty()) {
        auto f = open_out(sweep_csv);
        write_sweep_csv(result.sweeps, f);
      }
      json out = json::parse(calibration_table_json(result.table));
      out["residual_coherency_deg"] = result.residual_coherency_rad * 180.0 / kPi;
      json chosen = json::array();
      for (const auto& sw : result.sweeps) {
        const auto p = estimate_sweep_period(sw);
        chosen.push_back({{"ref", sw.ref},
                          {"swept", sw.swept},
                          {"chosen_offset_s", sw.chosen_offset_s},
                          {"bin_migration", sw.bin_migration},
                          {"period_s", p ? json(*p) : json(nullptr)}});
      }
      out["sweeps"] = chosen;
      if (table_path.empty()) {
        std::cout << out.dump(2) << '\n';
      } else {
        open_out(table_path) << out.dump(2) << '\n';
      }
    } else if (*grid) {
      GridRunConfig c;
      c.layout_mode = parse_layout_mode(layout_mode);
      c.solver_mode = parse_solver_mode(grid_solver);
      c.seed = seed;
      c.inject_phase_offsets = inject;
      c.amplitude_offset_db_sigma = amp_sigma;
      c.threads = threads;
      if (!azs.empty()) c.azimuths_deg = azs;
      if (!els.empty()) c.elevations_deg = els;
      const auto result = run_grid(c, scenario);
      write_grid_outputs(result, scenario, out_dir);
      std::size_t failed = 0;
      for (const auto& r : result.runs) failed += r.estimate ? 0 : 1;
      std::cout << "wrote " << result.runs.size() << " runs (" << failed << " failed) to " << out_dir << '\n';
    } else if (*synth) {
      ScenarioConfig s = scenario;
      if (!attens_path.empty()) {
        const auto sets = parse_attenuations(read_text_file(attens_path));
        if (sets.size() != 1) throw Error(ErrorCode::invalid_config, "synth takes exactly one attenuation set");
        s = with_attenuations(s, sets[0].per_channel());
      }
      auto cube = synthesize_cube(s);
      cube.scenario_hash = scenario_hash(s);
      save_cube(cube, cube_path);
      std::cout << "wrote " << cube.num_tx() << "x" << cube.num_rx() << "x" << cube.num_samples() << " cube to "
                << cube_path << '\n';
    } else if (*beam) {
      const auto cube = load_cube(cube_path);
      const auto peak = extract_peak_bin(range_dft(cube, scenario.processing.window));
      const auto spec = beamform_direct(peak.values, scenario.radar, scenario.processing.grid);
      if (!beam_csv.empty()) {
        auto f = open_out(beam_csv);
        write_beam_csv(spec, f);
      }
      const auto est = estimate_angle(spec);
      json out = {{"range_bin", peak.bin},
                  {"estimate", angle_json({est.azimuth, est.elevation})},
                  {"peak_magnitude", est.peak_magnitude},
                  {"on_boundary", est.on_boundary},
                  {"scenario_hash", cube.scenario_hash}};
      std::cout << out.dump(2) << '\n';
    } else if (*validate) {
      const auto diags = validate_scenario(scenario, closed_form);
      json out = json::array();
      for (const auto& d : diags) {
        out.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                       {"field", d.field},
                       {"rule", d.rule}});
      }
      std::cout << out.dump(2) << '\n';
      for (const auto& d : diags) {
        if (d.severity == Severity::error) return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "aoasim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
