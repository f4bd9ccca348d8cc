// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <aoasim/beamforming.hpp>
#include <aoasim/calibration.hpp>
#include <aoasim/core_model.hpp>
#include <aoasim/superposition_solver.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aoasim {

enum class LayoutMode { ideal, measured };
enum class SolverMode { reduced_layout, ideal_square };

struct GridRunConfig {
  std::vector<double> azimuths_deg{-4.0, -2.4, -0.8, 0.8, 2.4, 4.0};
  std::vector<double> elevations_deg{-7.0, -3.5, 0.0, 3.5, 7.0};
  LayoutMode layout_mode = LayoutMode::ideal;
  SolverMode solver_mode = SolverMode::reduced_layout;
  std::uint64_t seed = 1;
  bool inject_phase_offsets = false;    // random hidden channel phases, then calibrate
  double amplitude_offset_db_sigma = 0.0;  // random hidden channel gains (dB, normal)
  std::size_t threads = 0;              // 0 selects hardware concurrency
};

struct RunRecord {
  TargetAngle set_point;
  AttenuationSet attens;
  std::optional<AngleEstimate> estimate;
  std::optional<TargetAngle> predicted;  // analytic superposition peak on the simulated layout
  std::string status = "ok";
};

struct GridRunResult {
  GridRunConfig config;
  std::vector<RunRecord> runs;
  std::optional<CalibrationResult> calibration;
};

struct AxisSeries {
  std::vector<double> nominal_deg;
  std::vector<double> mean_error_deg;
  std::vector<double> mean_predicted_error_deg;
  std::vector<std::size_t> counts;
};

struct ErrorSummary {
  AxisSeries azimuth;
  AxisSeries elevation;
};

// Scenario actually simulated for a grid (layout mode, hidden imperfections, no calibration).
ScenarioConfig grid_scenario(const GridRunConfig& config, const ScenarioConfig& scenario);

// Layout handed to the solver for a grid.
ReducedLayout solver_layout(const GridRunConfig& config, const ScenarioConfig& scenario);

// One full-chain run at `target` on a prepared scenario.
RunRecord run_point(const TargetAngle& target, const ScenarioConfig& simulated, const ReducedLayout& solver,
                    const CalibrationTable* table = nullptr);

GridRunResult run_grid(const GridRunConfig& config, const ScenarioConfig& scenario);

ErrorSummary summarize(const GridRunResult& result);

void write_runs_csv(const GridRunResult& result, std::ostream& os);
void write_summary_csv(const ErrorSummary& summary, std::ostream& os);
std::string manifest_json(const GridRunResult& result, const ScenarioConfig& scenario);

// Writes runs.csv, summary.csv (when there are successful runs) and manifest.json.
void write_grid_outputs(const GridRunResult& result, const ScenarioConfig& scenario,
                        const std::filesystem::path& dir);

const char* to_string(LayoutMode mode);
const char* to_string(SolverMode mode);
LayoutMode parse_layout_mode(const std::string& s);
SolverMode parse_solver_mode(const std::string& s);

}  // namespace aoasim
