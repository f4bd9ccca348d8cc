// SPDX-License-Identifier: Apache-2.0
#include <aoasim/beamforming.hpp>
#include <aoasim/error.hpp>

#include <boost/math/special_functions/sinc.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace aoasim {

std::vector<Angle> grid_axis(double min_deg, double max_deg, double step_deg, GridSpacing spacing) {
  if (!(step_deg > 0.0) || !(min_deg < max_deg)) {
    throw Error(ErrorCode::invalid_config, "grid needs a positive step and min < max");
  }
  std::vector<Angle> out;
  if (spacing == GridSpacing::angle) {
    const auto n = static_cast<std::size_t>(std::floor((max_deg - min_deg) / step_deg + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(deg(min_deg + step_deg * static_cast<double>(i)));
  } else {
    const double s0 = std::sin(deg(min_deg).radians());
    const double s1 = std::sin(deg(max_deg).radians());
    const double ds = std::sin(deg(step_deg).radians());
    const auto n = static_cast<std::size_t>(std::floor((s1 - s0) / ds + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(rad(std::asin(s0 + ds * static_cast<double>(i))));
  }
  return out;
}

namespace {

void check_dims(const ChannelValues& x, const RadarConfig& radar) {
  if (x.num_tx != radar.num_tx || x.num_rx != radar.num_rx || x.values.size() != x.num_tx * x.num_rx) {
    throw Error(ErrorCode::dimension_mismatch, "channel values do not match the radar array");
  }
}

// Direct sum factored over the two element axes: element (t, r) contributes w_tx^t * w_rx^r.
cdouble steer(const ChannelValues& x, double k, const RadarConfig& r, double u, double v) {
  const cdouble w_tx = std::polar(1.0, -k * (r.tx_spacing_y_m * u + r.tx_spacing_z_m * v));
  const cdouble w_rx = std::polar(1.0, -k * (r.rx_spacing_y_m * u + r.rx_spacing_z_m * v));
  cdouble total = 0.0;
  for (std::size_t t = x.num_tx; t-- > 0;) {
    cdouble inner = 0.0;
    for (std::size_t e = x.num_rx; e-- > 0;) inner = inner * w_rx + x.at(t, e);
    total = total * w_tx + inner;
  }
  return total;
}

double sinc_normalized(double x) { return boost::math::sinc_pi(kPi * x); }

}  // namespace

cdouble beamform_at(const ChannelValues& x, const RadarConfig& radar, Angle az, Angle el) {
  check_dims(x, radar);
  const double k = 2.0 * kPi / radar.steering_wavelength();
  return steer(x, k, radar, std::sin(az.radians()) * std::cos(el.radians()), std::sin(el.radians()));
}

BeamSpectrum beamform_direct(const ChannelValues& x, const RadarConfig& radar, const AngleGrid& grid) {
  check_dims(x, radar);
  BeamSpectrum out;
  out.spacing = grid.spacing;
  out.az = grid_axis(grid.az_min_deg, grid.az_max_deg, grid.step_deg, grid.spacing);
  out.el = grid_axis(grid.el_min_deg, grid.el_max_deg, grid.step_deg, grid.spacing);
  out.values.resize(out.az.size() * out.el.size());

  const double k = 2.0 * kPi / radar.steering_wavelength();
  std::vector<double> sin_el(out.el.size()), cos_el(out.el.size());
  for (std::size_t j = 0; j < out.el.size(); ++j) {
    sin_el[j] = std::sin(out.el[j].radians());
    cos_el[j] = std::cos(out.el[j].radians());
  }
  for (std::size_t i = 0; i < out.az.size(); ++i) {
    const double sa = std::sin(out.az[i].radians());
    for (std::size_t j = 0; j < out.el.size(); ++j) {
      out.values[i * out.el.size() + j] = steer(x, k, radar, sa * cos_el[j], sin_el[j]);
    }
  }
  return out;
}

ChannelValues plane_wave_values(const AnglePair& direction, const RadarConfig& radar, cdouble amplitude) {
  ChannelValues x{radar.num_tx, radar.num_rx, std::vector<cdouble>(radar.num_tx * radar.num_rx)};
  const double k = 2.0 * kPi / radar.steering_wavelength();
  const double u = std::sin(direction.azimuth.radians()) * std::cos(direction.elevation.radians());
  const double v = std::sin(direction.elevation.radians());
  for (std::size_t t = 0; t < radar.num_tx; ++t) {
    for (std::size_t e = 0; e < radar.num_rx; ++e) {
      const auto p = element_position(t, e, radar);
      x.at(t, e) = amplitude * std::polar(1.0, k * (p.y_m * u + p.z_m * v));
    }
  }
  return x;
}

double g_az(Angle az, Angle theta_q, const RadarConfig& radar) {
  const double x = static_cast<double>(radar.num_rx) * radar.rx_spacing_y_m *
                   (std::sin(theta_q.radians()) - std::sin(az.radians())) / radar.steering_wavelength();
  return sinc_normalized(x);
}

double g_el(Angle el, Angle psi_q, const RadarConfig& radar) {
  const double x = static_cast<double>(radar.num_tx) * radar.tx_spacing_z_m *
                   (std::sin(psi_q.radians()) - std::sin(el.radians())) / radar.steering_wavelength();
  return sinc_normalized(x);
}

double closed_form_phase(std::size_t q, const ScenarioConfig& s) {
  if (q >= kNumChannels) throw Error(ErrorCode::index_out_of_range, "channel index out of range");
  const auto& r = s.radar;
  const auto& fe = s.layout.front_ends[q];
  const auto& ch = s.rts.channels[q];
  const double lambda = r.steering_wavelength();
  const double half_b = 0.5 * r.bandwidth_hz;
  const double cycles =
      (r.carrier_frequency_hz + half_b) * 2.0 * s.layout.range_m / kSpeedOfLight +
      (s.rts.intermediate_frequency_hz + half_b) * ch.delay_s +
      std::sin(fe.azimuth.radians()) * r.rx_spacing_y_m * static_cast<double>(r.num_rx - 1) / (2.0 * lambda) +
      std::sin(fe.elevation.radians()) * r.tx_spacing_z_m * static_cast<double>(r.num_tx - 1) / (2.0 * lambda);
  return 2.0 * kPi * cycles + ch.phase_offset_rad;
}

cdouble channel_response_closed_form(Angle az, Angle el, std::size_t q, const ScenarioConfig& s) {
  const auto& r = s.radar;
  if (r.tx_spacing_y_m != 0.0 || r.rx_spacing_z_m != 0.0) {
    throw Error(ErrorCode::constraint, "closed-form response needs zero TX azimuth and RX elevation spacing");
  }
  if (q >= kNumChannels) throw Error(ErrorCode::index_out_of_range, "channel index out of range");
  const auto& fe = s.layout.front_ends[q];
  const auto& ch = s.rts.channels[q];
  const double mag = ch.attenuation * ch.hardware_gain * static_cast<double>(r.num_samples * r.num_tx * r.num_rx) *
                     g_el(el, fe.elevation, r) * g_az(az, fe.azimuth, r);
  return std::polar(1.0, closed_form_phase(q, s)) * mag;
}

namespace {

// Vertex offset of a parabola through (-1, a), (0, b), (1, c), or nullopt when unusable.
std::optional<double> parabola_vertex(double a, double b, double c) {
  const double den = a - 2.0 * b + c;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !(den < 0.0)) return std::nullopt;
  return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

Angle refine(const std::vector<Angle>& axis, std::size_t i, double p, GridSpacing spacing) {
  if (spacing == GridSpacing::angle) {
    return rad(axis[i].radians() + p * 0.5 * (axis[i + 1].radians() - axis[i - 1].radians()));
  }
  const double s = std::sin(axis[i].radians()) +
                   p * 0.5 * (std::sin(axis[i + 1].radians()) - std::sin(axis[i - 1].radians()));
  return rad(std::asin(s));
}

}  // namespace

AngleEstimate estimate_angle(const BeamSpectrum& spec, std::optional<AnglePair> set_point) {
  const std::size_t na = spec.az.size(), ne = spec.el.size();
  if (na == 0 || ne == 0 || spec.values.size() != na * ne) {
    throw Error(ErrorCode::dimension_mismatch, "beam spectrum grid does not match its values");
  }
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t n = 0; n < spec.values.size(); ++n) {
    const double m = std::abs(spec.values[n]);
    if (m > best_mag) {
      best_mag = m;
      best = n;
    }
  }
  if (!(best_mag > 0.0)) throw Error(ErrorCode::no_detection, "beam spectrum is all zero");
  const std::size_t ia = best / ne, ie = best % ne;

  AngleEstimate est;
  est.azimuth = spec.az[ia];
  est.elevation = spec.el[ie];
  est.peak_magnitude = best_mag;
  auto logmag = [&](std::size_t a, std::size_t e) { return std::log(std::abs(spec.at(a, e))); };

  if (ia == 0 || ia + 1 == na) {
    est.on_boundary = true;
  } else if (auto p = parabola_vertex(logmag(ia - 1, ie), logmag(ia, ie), logmag(ia + 1, ie))) {
    est.azimuth = refine(spec.az, ia, *p, spec.spacing);
  }
  if (ie == 0 || ie + 1 == ne) {
    est.on_boundary = true;
  } else if (auto p = parabola_vertex(logmag(ia, ie - 1), logmag(ia, ie), logmag(ia, ie + 1))) {
    est.elevation = refine(spec.el, ie, *p, spec.spacing);
  }

  if (set_point) {
    est.set_point = set_point;
    est.azimuth_error = est.azimuth - set_point->azimuth;
    est.elevation_error = est.elevation - set_point->elevation;
  }
  return est;
}

void write_beam_csv(const BeamSpectrum& spec, std::ostream& os) {
  os << "az,el,re,im,mag_db\n" << std::setprecision(12);
  for (std::size_t i = 0; i < spec.az.size(); ++i) {
    for (std::size_t j = 0; j < spec.el.size(); ++j) {
      const cdouble v = spec.at(i, j);
      const double m = std::abs(v);
      const double db = m > 0.0 ? std::max(20.0 * std::log10(m), -400.0) : -400.0;
      os << spec.az[i].degrees() << ',' << spec.el[j].degrees() << ',' << v.real() << ',' << v.imag() << ','
         << db << '\n';
    }
  }
}

}  // namespace aoasim
