// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <aoasim/core_model.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace aoasim {

enum class SweepMetric { angle_error, peak_magnitude };
enum class Axis { azimuth, elevation };

struct SweepSettings {
  double span_s = 0.0;         // half-width of the offset range, 0 selects one wrap period
  std::size_t steps = 201;
  double swept_weight = 0.5;   // relative amplitude of the swept channel
  double max_gain = 2.0;       // larger balancing gain marks range-bin migration
  double fit_half_width = 0.15;  // extremum fit window, fraction of the wrap period (0 disables)
  SweepMetric metric = SweepMetric::angle_error;
};

struct CalibrationSweep {
  std::size_t ref = 0;
  std::size_t swept = 1;
  Axis axis = Axis::azimuth;
  double wrap_period_s = 0.0;
  std::vector<double> offsets_s;
  std::vector<double> angle_errors_deg;
  std::vector<double> peak_magnitudes;
  std::vector<bool> valid;
  double chosen_offset_s = 0.0;
  bool bin_migration = false;  // some points were rejected because the tone changed bin
};

struct CalibrationTable {
  std::array<double, kNumChannels> delay_offsets_s{};
  std::array<double, kNumChannels> gains{1.0, 1.0, 1.0, 1.0};
};

struct CalibrationResult {
  std::vector<CalibrationSweep> sweeps;
  CalibrationTable table;
  double residual_coherency_rad = 0.0;  // ground-truth check against the simulated hardware
};

inline const std::vector<std::pair<std::size_t, std::size_t>> kDefaultPairs = {{0, 1}, {0, 2}, {2, 3}};

// Axis monitored for a pair sharing a row (azimuth) or column (elevation).
Axis pair_axis(std::size_t ref, std::size_t swept);

CalibrationSweep run_sweep(const ScenarioConfig& scenario, std::size_t ref, std::size_t swept,
                           const SweepSettings& settings = {});

// Spacing of the two deepest interior minima of |error| at least half a wrap period apart, when both
// stay below max_error_deg near full peak magnitude. Empty when the sweep does not show two such minima.
std::optional<double> estimate_sweep_period(const CalibrationSweep& sweep, double max_error_deg = 0.05);

CalibrationTable build_calibration(const std::vector<CalibrationSweep>& sweeps);

// Adds the table delays to the channels. Gains are applied when attenuations are commanded.
ScenarioConfig apply_calibration(const ScenarioConfig& scenario, const CalibrationTable& table);

// Channel gains that equalize the single-channel magnitudes at the common detection bin.
CalibrationTable equalize_gains(const ScenarioConfig& scenario, CalibrationTable table);

CalibrationResult calibrate(const ScenarioConfig& scenario, const SweepSettings& settings = {},
                            const std::vector<std::pair<std::size_t, std::size_t>>& pairs = kDefaultPairs);

// Commanded attenuations times calibration gains.
ScenarioConfig with_attenuations(const ScenarioConfig& scenario, const std::array<double, kNumChannels>& a,
                                 const CalibrationTable* table = nullptr);

}  // namespace aoasim
