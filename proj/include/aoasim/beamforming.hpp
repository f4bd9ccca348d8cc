// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <aoasim/core_model.hpp>
#include <aoasim/signal_chain.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace aoasim {

// Beamformer output on an (azimuth, elevation) grid, values[ia * el.size() + ie].
struct BeamSpectrum {
  std::vector<Angle> az;
  std::vector<Angle> el;
  GridSpacing spacing = GridSpacing::angle;
  std::vector<cdouble> values;

  const cdouble& at(std::size_t ia, std::size_t ie) const { return values[ia * el.size() + ie]; }
};

struct AngleEstimate {
  Angle azimuth;
  Angle elevation;
  double peak_magnitude = 0.0;
  bool on_boundary = false;
  std::optional<AnglePair> set_point;
  Angle azimuth_error;    // estimate - set point, zero without a set point
  Angle elevation_error;
};

// Grid axis values. Angle spacing steps in degrees, sine spacing steps sin(angle) by sin(step).
std::vector<Angle> grid_axis(double min_deg, double max_deg, double step_deg, GridSpacing spacing);

BeamSpectrum beamform_direct(const ChannelValues& x, const RadarConfig& radar, const AngleGrid& grid);

// Single-point evaluation of the direct sum.
cdouble beamform_at(const ChannelValues& x, const RadarConfig& radar, Angle az, Angle el);

// Channel values of a unit plane wave from `direction` seen by the virtual array.
ChannelValues plane_wave_values(const AnglePair& direction, const RadarConfig& radar, cdouble amplitude = 1.0);

// Normalized sinc factor of the closed-form response on the azimuth / elevation axis.
double g_az(Angle az, Angle theta_q, const RadarConfig& radar);
double g_el(Angle el, Angle psi_q, const RadarConfig& radar);

// Closed-form channel phase phi_A,q (plus the channel's hardware phase offset).
double closed_form_phase(std::size_t q, const ScenarioConfig& s);

// Closed-form single-channel beamformer response. Requires tx_spacing_y = rx_spacing_z = 0.
cdouble channel_response_closed_form(Angle az, Angle el, std::size_t q, const ScenarioConfig& s);

AngleEstimate estimate_angle(const BeamSpectrum& spectrum, std::optional<AnglePair> set_point = std::nullopt);

void write_beam_csv(const BeamSpectrum& spectrum, std::ostream& os);

}  // namespace aoasim
