// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <aoasim/angle.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aoasim {

inline constexpr std::size_t kNumChannels = 4;

// Which frequency defines lambda in the steering phase.
enum class SteeringReference { chirp_center, carrier };

struct RadarConfig {
  double carrier_frequency_hz = 77e9;
  double bandwidth_hz = 1e9;
  double chirp_period_s = 50e-6;
  std::size_t num_samples = 1024;
  std::size_t num_tx = 3;
  std::size_t num_rx = 4;
  double tx_spacing_y_m = 0.0;
  double rx_spacing_y_m = kSpeedOfLight / (77e9 + 0.5e9) / 2.0;
  double tx_spacing_z_m = kSpeedOfLight / (77e9 + 0.5e9) / 2.0;
  double rx_spacing_z_m = 0.0;
  double sample_rate_hz = 0.0;  // 0 selects num_samples / chirp_period
  SteeringReference steering = SteeringReference::chirp_center;

  double effective_sample_rate() const;
  double steering_frequency() const;
  double steering_wavelength() const;
  double slope() const { return bandwidth_hz / chirp_period_s; }

  // Half-wavelength spacing on the RX azimuth and TX elevation axes, zero on the others.
  void set_default_spacing();
};

// q = 0 bottom-left, 1 bottom-right, 2 top-left, 3 top-right.
struct FrontEndLayout {
  double range_m = 1.0;
  std::array<AnglePair, kNumChannels> front_ends{};

  // Exact square with the given corner angles.
  static FrontEndLayout square(Angle left, Angle right, Angle bottom, Angle top, double range_m = 1.0);
  // The surveyed bench positions shipped as the default scenario.
  static FrontEndLayout bench();
};

struct ReducedLayout {
  Angle left, right, bottom, top;
  // |theta0 - theta2|, |theta1 - theta3|, |psi0 - psi1|, |psi2 - psi3|
  std::array<Angle, 4> residuals{};

  // Square layout with the reduced corners.
  FrontEndLayout to_layout(double range_m) const;
};

struct RtsChannel {
  double attenuation = 1.0;      // commanded linear amplitude A_q
  double delay_s = 0.0;          // tau_rts,q
  double phase_offset_rad = 0.0; // hardware phase (hidden in calibration experiments)
  double hardware_gain = 1.0;    // hardware amplitude error, multiplies attenuation
};

struct RtsConfig {
  double intermediate_frequency_hz = 500e6;
  std::array<RtsChannel, kNumChannels> channels{};

  double wrap_period_s(const RadarConfig& radar) const;
};

enum class Window { rectangular, hann };
enum class GridSpacing { angle, sine };

struct AngleGrid {
  double az_min_deg = -15.0;
  double az_max_deg = 15.0;
  double el_min_deg = -15.0;
  double el_max_deg = 15.0;
  double step_deg = 0.05;
  GridSpacing spacing = GridSpacing::angle;
};

struct ProcessingConfig {
  Window window = Window::rectangular;
  std::optional<double> snr_db;  // additive white noise when set
  std::uint64_t noise_seed = 1;
  AngleGrid grid;
};

struct ScenarioConfig {
  RadarConfig radar;
  FrontEndLayout layout = FrontEndLayout::bench();
  RtsConfig rts;
  ProcessingConfig processing;
};

enum class Severity { warning, error };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string field;
  std::string rule;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// c0 / f.
double wavelength(double frequency_hz);

ReducedLayout reduce_layout(const FrontEndLayout& layout);

// Square with the reduced corners of `layout`.
FrontEndLayout symmetrize(const FrontEndLayout& layout);

// Square centred on boresight with the reduced azimuth and elevation spans of `layout`.
FrontEndLayout ideal_square(const FrontEndLayout& layout);

std::vector<Diagnostic> validate_scenario(const ScenarioConfig& config, bool closed_form_path = false);

// Throws invalid_config listing the error diagnostics, if any.
void require_valid(const ScenarioConfig& config);

}  // namespace aoasim
