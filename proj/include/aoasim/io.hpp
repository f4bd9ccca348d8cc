// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <aoasim/calibration.hpp>
#include <aoasim/core_model.hpp>
#include <aoasim/signal_chain.hpp>
#include <aoasim/superposition_solver.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace aoasim {

// Scenario files are JSON; omitted keys keep their defaults. When no spacing is given the
// half-wavelength defaults are derived from the file's frequencies.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& s, int indent = 2);

// FNV-1a 64 of the compact scenario JSON, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& s);

// Cube file: uint32 LE header length, JSON header, then complex64 LE samples in [tx][rx][k] order.
void write_cube(const SampleCube& cube, std::ostream& os);
SampleCube read_cube(std::istream& is);
void save_cube(const SampleCube& cube, const std::filesystem::path& path);
SampleCube load_cube(const std::filesystem::path& path);

std::string calibration_table_json(const CalibrationTable& table, int indent = 2);
CalibrationTable parse_calibration_table(const std::string& text);

// offset_s,angle_error_deg plus pair, validity and peak magnitude columns.
void write_sweep_csv(const std::vector<CalibrationSweep>& sweeps, std::ostream& os);

// One object {"left","right","bottom","top"} or an array of them.
std::vector<AttenuationSet> parse_attenuations(const std::string& text);
std::string attenuation_json(const AttenuationSet& a, int indent = -1);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace aoasim
