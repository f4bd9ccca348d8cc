// SPDX-License-Identifier: Apache-2.0
#include <aoasim/beamforming.hpp>
#include <aoasim/error.hpp>
#include <aoasim/superposition_solver.hpp>

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>

namespace aoasim {

std::array<double, kNumChannels> AttenuationSet::per_channel() const {
  return {bottom * left, bottom * right, top * left, top * right};
}

AttenuationSet AttenuationSet::one_hot(std::size_t q) {
  if (q >= kNumChannels) throw Error(ErrorCode::index_out_of_range, "channel index out of range");
  AttenuationSet a;
  a.left = (q % 2 == 0) ? 1.0 : 0.0;
  a.right = 1.0 - a.left;
  a.bottom = (q < 2) ? 1.0 : 0.0;
  a.top = 1.0 - a.bottom;
  return a;
}

namespace {

// d/dx (sin x / x). Odd series below |x| < 1e-2, where the quotient form cancels badly.
double sinc_unnormalized_derivative(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x * (-1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 / 45360.0)));
  }
  return std::cos(x) / x - std::sin(x) / (x * x);
}

// d/d(look) sinc(N d (sin(pos) - sin(look)) / lambda) with the normalized sinc.
double dg(Angle look, Angle pos, double n, double spacing, double lambda) {
  const double k = kPi * n * spacing / lambda;
  const double delta = std::sin(pos.radians()) - std::sin(look.radians());
  return -std::cos(look.radians()) * k * sinc_unnormalized_derivative(k * delta);
}

// Solves w_a * n + w_b * m = 0 with the larger weight normalized to +1.
std::pair<double, double> axis_weights(double n, double m) {
  if (n == 0.0 && m == 0.0) {
    throw Error(ErrorCode::unsolvable, "both derivative terms vanish at this angle");
  }
  double a = m, b = -n;
  const double scale = std::abs(a) >= std::abs(b) ? a : b;
  return {a / scale + 0.0, b / scale + 0.0};
}

double sample_gain(const RadarConfig& r) {
  return static_cast<double>(r.num_samples * r.num_tx * r.num_rx);
}

// Maximizes f on [lo, hi] (degrees) with Brent's bracketed search.
double refine_max(const auto& f, double lo, double hi, double tol_deg) {
  const int bits = std::max(8, static_cast<int>(std::ceil(-std::log2(tol_deg / 64.0))));
  std::uintmax_t iters = 200;
  return boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, bits, iters).first;
}

}  // namespace

double dg_az(Angle az, Angle theta_q, const RadarConfig& radar) {
  return dg(az, theta_q, static_cast<double>(radar.num_rx), radar.rx_spacing_y_m, radar.steering_wavelength());
}

double dg_el(Angle el, Angle psi_q, const RadarConfig& radar) {
  return dg(el, psi_q, static_cast<double>(radar.num_tx), radar.tx_spacing_z_m, radar.steering_wavelength());
}

AttenuationSet solve_attenuations(const TargetAngle& t, const ReducedLayout& l, const RadarConfig& radar) {
  AttenuationSet a;
  std::tie(a.left, a.right) = axis_weights(dg_az(t.azimuth, l.left, radar), dg_az(t.azimuth, l.right, radar));
  std::tie(a.bottom, a.top) =
      axis_weights(dg_el(t.elevation, l.bottom, radar), dg_el(t.elevation, l.top, radar));
  a.extrapolated = t.azimuth < l.left || t.azimuth > l.right || t.elevation < l.bottom || t.elevation > l.top;
  return a;
}

cdouble superimposed_value(Angle az, Angle el, const AttenuationSet& a, const ReducedLayout& l,
                           const RadarConfig& radar) {
  const double h = a.left * g_az(az, l.left, radar) + a.right * g_az(az, l.right, radar);
  const double v = a.bottom * g_el(el, l.bottom, radar) + a.top * g_el(el, l.top, radar);
  return {sample_gain(radar) * h * v, 0.0};
}

cdouble layout_superposition(Angle az, Angle el, const std::array<cdouble, kNumChannels>& w,
                             const FrontEndLayout& layout, const RadarConfig& radar) {
  cdouble sum = 0.0;
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    const auto& fe = layout.front_ends[q];
    sum += w[q] * (g_az(az, fe.azimuth, radar) * g_el(el, fe.elevation, radar));
  }
  return sample_gain(radar) * sum;
}

namespace {

TargetAngle coordinate_search(const auto& mag, const PeakSearch& s, bool separable) {
  const auto n = static_cast<std::size_t>(std::floor((s.max_deg - s.min_deg) / s.coarse_step_deg + 1e-9)) + 1;
  double best = -1.0, ba = 0.0, be = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = s.min_deg + s.coarse_step_deg * static_cast<double>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double e = s.min_deg + s.coarse_step_deg * static_cast<double>(j);
      const double m = mag(a, e);
      if (m > best) {
        best = m;
        ba = a;
        be = e;
      }
    }
  }
  if (!(best > 0.0)) throw Error(ErrorCode::flat_spectrum, "superposition is zero everywhere");

  const double h = s.coarse_step_deg;
  auto clamp_lo = [&](double x) { return std::max(s.min_deg, x - h); };
  auto clamp_hi = [&](double x) { return std::min(s.max_deg, x + h); };
  for (int pass = 0; pass < (separable ? 1 : 50); ++pass) {
    const double na = refine_max([&](double a) { return mag(a, be); }, clamp_lo(ba), clamp_hi(ba), s.tolerance_deg);
    const double ne = refine_max([&](double e) { return mag(na, e); }, clamp_lo(be), clamp_hi(be), s.tolerance_deg);
    const bool done = std::abs(na - ba) < 0.1 * s.tolerance_deg && std::abs(ne - be) < 0.1 * s.tolerance_deg;
    ba = na;
    be = ne;
    if (done) break;
  }
  return {deg(ba), deg(be)};
}

}  // namespace

TargetAngle predict_peak(const AttenuationSet& a, const ReducedLayout& l, const RadarConfig& radar,
                         const PeakSearch& search) {
  const auto w = a.per_channel();
  if (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0 && w[3] == 0.0) {
    throw Error(ErrorCode::flat_spectrum, "all attenuations are zero");
  }
  auto mag = [&](double az, double el) { return std::abs(superimposed_value(deg(az), deg(el), a, l, radar)); };
  return coordinate_search(mag, search, true);
}

TargetAngle predict_peak_layout(const std::array<cdouble, kNumChannels>& w, const FrontEndLayout& layout,
                                const RadarConfig& radar, const PeakSearch& search) {
  if (w[0] == 0.0 && w[1] == 0.0 && w[2] == 0.0 && w[3] == 0.0) {
    throw Error(ErrorCode::flat_spectrum, "all weights are zero");
  }
  auto mag = [&](double az, double el) {
    return std::abs(layout_superposition(deg(az), deg(el), w, layout, radar));
  };
  return coordinate_search(mag, search, false);
}

double coherency_check(const std::array<double, kNumChannels>& phases) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    for (std::size_t j = i + 1; j < kNumChannels; ++j) {
      worst = std::max(worst, std::abs(wrap_phase(phases[i] - phases[j])));
    }
  }
  return worst;
}

namespace {

// Array centroid of the virtual elements.
ElementPosition centroid(const RadarConfig& r) {
  const double t = 0.5 * static_cast<double>(r.num_tx - 1);
  const double e = 0.5 * static_cast<double>(r.num_rx - 1);
  return {r.tx_spacing_y_m * t + r.rx_spacing_y_m * e, r.tx_spacing_z_m * t + r.rx_spacing_z_m * e};
}

// Channel phase without the hardware offset.
double geometric_phase(std::size_t q, const ScenarioConfig& s) {
  if (q >= kNumChannels) throw Error(ErrorCode::index_out_of_range, "channel index out of range");
  const auto& r = s.radar;
  const auto& fe = s.layout.front_ends[q];
  const double half_b = 0.5 * r.bandwidth_hz;
  const auto c = centroid(r);
  const double u = std::sin(fe.azimuth.radians()) * std::cos(fe.elevation.radians());
  const double v = std::sin(fe.elevation.radians());
  const double cycles = (r.carrier_frequency_hz + half_b) * 2.0 * s.layout.range_m / kSpeedOfLight +
                        (s.rts.intermediate_frequency_hz + half_b) * s.rts.channels[q].delay_s +
                        (c.y_m * u + c.z_m * v) / r.steering_wavelength();
  return 2.0 * kPi * cycles;
}

}  // namespace

double direct_channel_phase(std::size_t q, const ScenarioConfig& s) {
  return geometric_phase(q, s) + s.rts.channels[q].phase_offset_rad;
}

double closed_form_phase_discrepancy(std::size_t q, const ScenarioConfig& s) {
  return wrap_phase(direct_channel_phase(q, s) - closed_form_phase(q, s));
}

std::array<double, kNumChannels> direct_channel_phases(const ScenarioConfig& s) {
  std::array<double, kNumChannels> out{};
  for (std::size_t q = 0; q < kNumChannels; ++q) out[q] = direct_channel_phase(q, s);
  return out;
}

ScenarioConfig with_coherent_phases(const ScenarioConfig& s) {
  ScenarioConfig out = s;
  const double ref = geometric_phase(0, s);
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    out.rts.channels[q].phase_offset_rad = wrap_phase(ref - geometric_phase(q, s));
  }
  return out;
}

}  // namespace aoasim
