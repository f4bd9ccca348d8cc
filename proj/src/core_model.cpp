// SPDX-License-Identifier: Apache-2.0
#include <aoasim/core_model.hpp>
#include <aoasim/error.hpp>

#include <cmath>
#include <sstream>

namespace aoasim {

double RadarConfig::effective_sample_rate() const {
  return sample_rate_hz > 0.0 ? sample_rate_hz : static_cast<double>(num_samples) / chirp_period_s;
}

double RadarConfig::steering_frequency() const {
  return steering == SteeringReference::carrier ? carrier_frequency_hz
                                                : carrier_frequency_hz + 0.5 * bandwidth_hz;
}

double RadarConfig::steering_wavelength() const { return wavelength(steering_frequency()); }

void RadarConfig::set_default_spacing() {
  const double half = 0.5 * steering_wavelength();
  tx_spacing_y_m = 0.0;
  rx_spacing_y_m = half;
  tx_spacing_z_m = half;
  rx_spacing_z_m = 0.0;
}

double RtsConfig::wrap_period_s(const RadarConfig& radar) const {
  return 1.0 / (intermediate_frequency_hz + 0.5 * radar.bandwidth_hz);
}

FrontEndLayout FrontEndLayout::square(Angle left, Angle right, Angle bottom, Angle top, double range_m) {
  FrontEndLayout l;
  l.range_m = range_m;
  l.front_ends = {AnglePair{left, bottom}, AnglePair{right, bottom}, AnglePair{left, top},
                  AnglePair{right, top}};
  return l;
}

FrontEndLayout FrontEndLayout::bench() {
  FrontEndLayout l;
  l.range_m = 1.0;
  l.front_ends = {AnglePair{deg(-5.4), deg(-8.8)}, AnglePair{deg(4.5), deg(-7.7)},
                  AnglePair{deg(-3.4), deg(8.4)}, AnglePair{deg(3.8), deg(9.9)}};
  return l;
}

FrontEndLayout ReducedLayout::to_layout(double range_m) const {
  return FrontEndLayout::square(left, right, bottom, top, range_m);
}

double wavelength(double frequency_hz) {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) {
    throw Error(ErrorCode::invalid_config, "frequency must be positive");
  }
  return kSpeedOfLight / frequency_hz;
}

namespace {

Angle mean(Angle a, Angle b) { return rad(0.5 * (a.radians() + b.radians())); }
Angle absdiff(Angle a, Angle b) { return rad(std::abs(a.radians() - b.radians())); }

bool in_open_hemisphere(Angle a) {
  return std::isfinite(a.radians()) && std::abs(a.radians()) < 0.5 * kPi;
}

}  // namespace

ReducedLayout reduce_layout(const FrontEndLayout& layout) {
  const auto& fe = layout.front_ends;
  for (const auto& p : fe) {
    if (!in_open_hemisphere(p.azimuth) || !in_open_hemisphere(p.elevation)) {
      throw Error(ErrorCode::invalid_config, "front-end angles must lie within (-90, 90) degrees");
    }
  }
  ReducedLayout r;
  r.left = mean(fe[0].azimuth, fe[2].azimuth);
  r.right = mean(fe[1].azimuth, fe[3].azimuth);
  r.bottom = mean(fe[0].elevation, fe[1].elevation);
  r.top = mean(fe[2].elevation, fe[3].elevation);
  r.residuals = {absdiff(fe[0].azimuth, fe[2].azimuth), absdiff(fe[1].azimuth, fe[3].azimuth),
                 absdiff(fe[0].elevation, fe[1].elevation), absdiff(fe[2].elevation, fe[3].elevation)};
  if (!(r.left < r.right) || !(r.bottom < r.top)) {
    throw Error(ErrorCode::degenerate_layout, "reduced layout requires left < right and bottom < top");
  }
  return r;
}

FrontEndLayout symmetrize(const FrontEndLayout& layout) {
  return reduce_layout(layout).to_layout(layout.range_m);
}

FrontEndLayout ideal_square(const FrontEndLayout& layout) {
  const auto r = reduce_layout(layout);
  const Angle half_az = rad(0.5 * (r.right.radians() - r.left.radians()));
  const Angle half_el = rad(0.5 * (r.top.radians() - r.bottom.radians()));
  return FrontEndLayout::square(-half_az, half_az, -half_el, half_el, layout.range_m);
}

std::vector<Diagnostic> validate_scenario(const ScenarioConfig& c, bool closed_form_path) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string field, std::string rule) {
    out.push_back({Severity::error, std::move(field), std::move(rule)});
  };
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) err(field, "must be positive and finite");
  };
  auto non_negative = [&](double v, const std::string& field) {
    if (!(v >= 0.0) || !std::isfinite(v)) err(field, "must be non-negative and finite");
  };

  const auto& r = c.radar;
  positive(r.carrier_frequency_hz, "radar.carrier_frequency_hz");
  positive(r.bandwidth_hz, "radar.bandwidth_hz");
  positive(r.chirp_period_s, "radar.chirp_period_s");
  if (r.num_samples < 2) err("radar.num_samples", "must be at least 2");
  if (r.num_tx < 1) err("radar.num_tx", "must be at least 1");
  if (r.num_rx < 1) err("radar.num_rx", "must be at least 1");
  non_negative(r.tx_spacing_y_m, "radar.tx_spacing_y_m");
  non_negative(r.rx_spacing_y_m, "radar.rx_spacing_y_m");
  non_negative(r.tx_spacing_z_m, "radar.tx_spacing_z_m");
  non_negative(r.rx_spacing_z_m, "radar.rx_spacing_z_m");
  non_negative(r.sample_rate_hz, "radar.sample_rate_hz");
  if (closed_form_path) {
    if (r.tx_spacing_y_m != 0.0) {
      out.push_back({Severity::warning, "radar.tx_spacing_y_m", "must be zero for the closed-form response"});
    }
    if (r.rx_spacing_z_m != 0.0) {
      out.push_back({Severity::warning, "radar.rx_spacing_z_m", "must be zero for the closed-form response"});
    }
  }

  positive(c.layout.range_m, "layout.range_m");
  bool angles_ok = true;
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    const auto& p = c.layout.front_ends[q];
    const std::string prefix = "layout.front_ends[" + std::to_string(q) + "]";
    if (!in_open_hemisphere(p.azimuth)) {
      err(prefix + ".azimuth", "must lie within (-90, 90) degrees");
      angles_ok = false;
    }
    if (!in_open_hemisphere(p.elevation)) {
      err(prefix + ".elevation", "must lie within (-90, 90) degrees");
      angles_ok = false;
    }
  }
  if (angles_ok) {
    try {
      (void)reduce_layout(c.layout);
    } catch (const Error&) {
      err("layout.front_ends", "reduced layout requires left < right and bottom < top");
    }
  }

  positive(c.rts.intermediate_frequency_hz, "rts.intermediate_frequency_hz");
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    const auto& ch = c.rts.channels[q];
    const std::string prefix = "rts.channels[" + std::to_string(q) + "]";
    non_negative(ch.attenuation, prefix + ".attenuation");
    non_negative(ch.delay_s, prefix + ".delay_s");
    non_negative(ch.hardware_gain, prefix + ".hardware_gain");
    if (!std::isfinite(ch.phase_offset_rad)) err(prefix + ".phase_offset_rad", "must be finite");
  }

  const auto& g = c.processing.grid;
  positive(g.step_deg, "processing.grid.step_deg");
  if (!(g.az_min_deg < g.az_max_deg) || g.az_min_deg <= -90.0 || g.az_max_deg >= 90.0) {
    err("processing.grid.azimuth", "must be an increasing range within (-90, 90) degrees");
  }
  if (!(g.el_min_deg < g.el_max_deg) || g.el_min_deg <= -90.0 || g.el_max_deg >= 90.0) {
    err("processing.grid.elevation", "must be an increasing range within (-90, 90) degrees");
  }
  if (c.processing.snr_db && !std::isfinite(*c.processing.snr_db)) {
    err("processing.snr_db", "must be finite");
  }
  return out;
}

void require_valid(const ScenarioConfig& config) {
  std::ostringstream msg;
  bool bad = false;
  for (const auto& d : validate_scenario(config)) {
    if (d.severity != Severity::error) continue;
    msg << (bad ? "; " : "") << d.field << " " << d.rule;
    bad = true;
  }
  if (bad) throw Error(ErrorCode::invalid_config, msg.str());
}

}  // namespace aoasim
