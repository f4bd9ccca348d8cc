// SPDX-License-Identifier: Apache-2.0
#include <aoasim/error.hpp>
#include <aoasim/experiment.hpp>
#include <aoasim/io.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <thread>

#ifndef AOASIM_VERSION
#define AOASIM_VERSION "0.0.0"
#endif

namespace aoasim {

const char* to_string(LayoutMode mode) { return mode == LayoutMode::ideal ? "ideal" : "measured"; }

const char* to_string(SolverMode mode) {
  return mode == SolverMode::reduced_layout ? "reduced-layout" : "ideal-square";
}

LayoutMode parse_layout_mode(const std::string& s) {
  if (s == "ideal") return LayoutMode::ideal;
  if (s == "measured") return LayoutMode::measured;
  throw Error(ErrorCode::invalid_config, "unknown layout mode '" + s + "'");
}

SolverMode parse_solver_mode(const std::string& s) {
  if (s == "reduced-layout") return SolverMode::reduced_layout;
  if (s == "ideal-square") return SolverMode::ideal_square;
  throw Error(ErrorCode::invalid_config, "unknown solver mode '" + s + "'");
}

namespace {

bool has_imperfections(const GridRunConfig& c) {
  return c.inject_phase_offsets || c.amplitude_offset_db_sigma > 0.0;
}

}  // namespace

ScenarioConfig grid_scenario(const GridRunConfig& config, const ScenarioConfig& scenario) {
  ScenarioConfig s = scenario;
  if (config.layout_mode == LayoutMode::ideal) s.layout = ideal_square(scenario.layout);
  if (!has_imperfections(config)) return with_coherent_phases(s);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::normal_distribution<double> gain_db(0.0, config.amplitude_offset_db_sigma);
  for (auto& ch : s.rts.channels) {
    const double p = phase(rng);
    const double g = gain_db(rng);
    if (config.inject_phase_offsets) ch.phase_offset_rad += p;
    if (config.amplitude_offset_db_sigma > 0.0) ch.hardware_gain *= std::pow(10.0, g / 20.0);
  }
  return s;
}

ReducedLayout solver_layout(const GridRunConfig& config, const ScenarioConfig& scenario) {
  if (config.solver_mode == SolverMode::ideal_square || config.layout_mode == LayoutMode::ideal) {
    return reduce_layout(ideal_square(scenario.layout));
  }
  return reduce_layout(scenario.layout);
}

RunRecord run_point(const TargetAngle& target, const ScenarioConfig& simulated, const ReducedLayout& solver,
                    const CalibrationTable* table) {
  RunRecord rec;
  rec.set_point = target;
  rec.attens = solve_attenuations(target, solver, simulated.radar);
  const auto a = rec.attens.per_channel();
  ScenarioConfig s = with_attenuations(simulated, a, table);
  if (table) s = apply_calibration(s, *table);

  const auto spectrum = range_dft(synthesize_cube(s), s.processing.window);
  const auto peak = extract_peak_bin(spectrum);
  rec.estimate = estimate_angle(beamform_direct(peak.values, s.radar, s.processing.grid), target);
  rec.predicted = predict_peak_layout({a[0], a[1], a[2], a[3]}, simulated.layout, simulated.radar);
  if (rec.estimate->on_boundary) rec.status = "boundary";
  else if (rec.attens.extrapolated) rec.status = "extrapolated";
  return rec;
}

GridRunResult run_grid(const GridRunConfig& config, const ScenarioConfig& scenario) {
  GridRunResult result;
  result.config = config;
  std::vector<TargetAngle> targets;
  for (double az : config.azimuths_deg) {
    for (double el : config.elevations_deg) targets.push_back({deg(az), deg(el)});
  }
  if (targets.empty()) return result;

  require_valid(scenario);
  const ScenarioConfig simulated = grid_scenario(config, scenario);
  const ReducedLayout solver = solver_layout(config, scenario);
  if (has_imperfections(config)) result.calibration = calibrate(simulated);
  const CalibrationTable* table = result.calibration ? &result.calibration->table : nullptr;

  result.runs.resize(targets.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++) {
      try {
        result.runs[i] = run_point(targets[i], simulated, solver, table);
      } catch (const std::exception& e) {
        RunRecord failed;
        failed.set_point = targets[i];
        try {
          failed.attens = solve_attenuations(targets[i], solver, simulated.radar);
        } catch (const std::exception&) {
        }
        failed.status = std::string("error: ") + e.what();
        result.runs[i] = failed;
      }
    }
  };
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, targets.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return result;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  double predicted_sum = 0.0;
  std::size_t count = 0;
  std::size_t predicted_count = 0;
};

AxisSeries finish(const std::vector<double>& nominal, const std::map<double, Accumulator>& acc) {
  AxisSeries s;
  for (double n : nominal) {
    if (std::find(s.nominal_deg.begin(), s.nominal_deg.end(), n) != s.nominal_deg.end()) continue;
    const auto it = acc.find(n);
    if (it == acc.end() || it->second.count == 0) continue;
    const auto& a = it->second;
    s.nominal_deg.push_back(n);
    s.mean_error_deg.push_back(a.sum / static_cast<double>(a.count));
    s.mean_predicted_error_deg.push_back(a.predicted_count ? a.predicted_sum / static_cast<double>(a.predicted_count)
                                                           : std::nan(""));
    s.counts.push_back(a.count);
  }
  return s;
}

}  // namespace

ErrorSummary summarize(const GridRunResult& result) {
  std::map<double, Accumulator> az, el;
  std::vector<double> az_order, el_order;
  for (const auto& run : result.runs) {
    if (!run.estimate) continue;
    const double naz = run.set_point.azimuth.degrees();
    const double nel = run.set_point.elevation.degrees();
    az_order.push_back(naz);
    el_order.push_back(nel);
    auto& a = az[naz];
    auto& e = el[nel];
    a.sum += run.estimate->azimuth_error.degrees();
    e.sum += run.estimate->elevation_error.degrees();
    ++a.count;
    ++e.count;
    if (run.predicted) {
      a.predicted_sum += run.predicted->azimuth.degrees() - naz;
      e.predicted_sum += run.predicted->elevation.degrees() - nel;
      ++a.predicted_count;
      ++e.predicted_count;
    }
  }
  if (az_order.empty()) throw Error(ErrorCode::constraint, "no successful runs to summarize");
  std::sort(az_order.begin(), az_order.end());
  std::sort(el_order.begin(), el_order.end());
  return {finish(az_order, az), finish(el_order, el)};
}

void write_runs_csv(const GridRunResult& result, std::ostream& os) {
  os << "set_az,set_el,A_l,A_r,A_b,A_t,est_az,est_el,err_az,err_el,pred_az,pred_el,status\n"
     << std::setprecision(12);
  for (const auto& r : result.runs) {
    os << r.set_point.azimuth.degrees() << ',' << r.set_point.elevation.degrees() << ',' << r.attens.left << ','
       << r.attens.right << ',' << r.attens.bottom << ',' << r.attens.top << ',';
    if (r.estimate) {
      os << r.estimate->azimuth.degrees() << ',' << r.estimate->elevation.degrees() << ','
         << r.estimate->azimuth_error.degrees() << ',' << r.estimate->elevation_error.degrees() << ',';
    } else {
      os << ",,,,";
    }
    if (r.predicted) {
      os << r.predicted->azimuth.degrees() << ',' << r.predicted->elevation.degrees() << ',';
    } else {
      os << ",,";
    }
    std::string status = r.status;
    for (auto& c : status) {
      if (c == ',' || c == '\n') c = ';';
    }
    os << status << '\n';
  }
}

void write_summary_csv(const ErrorSummary& summary, std::ostream& os) {
  os << "axis,nominal_deg,mean_error_deg,mean_predicted_error_deg,count\n" << std::setprecision(12);
  auto rows = [&](const char* name, const AxisSeries& s) {
    for (std::size_t i = 0; i < s.nominal_deg.size(); ++i) {
      os << name << ',' << s.nominal_deg[i] << ',' << s.mean_error_deg[i] << ',' << s.mean_predicted_error_deg[i]
         << ',' << s.counts[i] << '\n';
    }
  };
  rows("azimuth", summary.azimuth);
  rows("elevation", summary.elevation);
}

std::string manifest_json(const GridRunResult& result, const ScenarioConfig& scenario) {
  using nlohmann::json;
  const auto& c = result.config;
  std::size_t failed = 0;
  for (const auto& r : result.runs) failed += r.estimate ? 0 : 1;
  json j = {
      {"tool", "aoasim"},
      {"version", AOASIM_VERSION},
      {"compiler", __VERSION__},
      {"seed", c.seed},
      {"config",
       {{"azimuths_deg", c.azimuths_deg},
        {"elevations_deg", c.elevations_deg},
        {"layout_mode", to_string(c.layout_mode)},
        {"solver_mode", to_string(c.solver_mode)},
        {"inject_phase_offsets", c.inject_phase_offsets},
        {"amplitude_offset_db_sigma", c.amplitude_offset_db_sigma}}},
      {"scenario_hash", scenario_hash(scenario)},
      {"scenario", json::parse(scenario_to_json(scenario))},
      {"runs", result.runs.size()},
      {"failed_runs", failed},
  };
  if (result.calibration) {
    j["calibration"] = json::parse(calibration_table_json(result.calibration->table));
    j["calibration"]["residual_coherency_deg"] = result.calibration->residual_coherency_rad * 180.0 / kPi;
  }
  return j.dump(2);
}

void write_grid_outputs(const GridRunResult& result, const ScenarioConfig& scenario,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error(ErrorCode::io, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("runs.csv");
    write_runs_csv(result, f);
  }
  {
    auto f = open("manifest.json");
    f << manifest_json(result, scenario) << '\n';
  }
  bool any = false;
  for (const auto& r : result.runs) any = any || r.estimate.has_value();
  if (any) {
    auto f = open("summary.csv");
    write_summary_csv(summarize(result), f);
  }
}

}  // namespace aoasim
