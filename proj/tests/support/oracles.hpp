// SPDX-License-Identifier: Apache-2.0
// Independent reference implementations used only by tests. They share no code with the
// library beyond the public data types.
#pragma once

#include <aoasim/core_model.hpp>
#include <aoasim/signal_chain.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

using ld = long double;
inline constexpr ld kPiL = 3.141592653589793238462643383279502884L;
inline constexpr ld kC0 = 299792458.0L;

inline ld rad(double deg) { return static_cast<ld>(deg) * kPiL / 180.0L; }

// O(N^2) forward DFT, X[m] = sum_k x[k] exp(-j 2 pi k m / N).
inline std::vector<std::complex<ld>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<ld>> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    std::complex<ld> acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const ld a = -2.0L * kPiL * static_cast<ld>((k * m) % n) / static_cast<ld>(n);
      acc += std::complex<ld>(x[k].real(), x[k].imag()) * std::complex<ld>(std::cos(a), std::sin(a));
    }
    out[m] = acc;
  }
  return out;
}

// Normalized sinc in extended precision.
inline ld sinc(ld x) {
  if (x == 0.0L) return 1.0L;
  return std::sin(kPiL * x) / (kPiL * x);
}

// Azimuth sinc factor written out from its definition, angles in radians.
inline ld g_az(ld az, ld theta, const aoasim::RadarConfig& r) {
  const ld lambda = kC0 / (static_cast<ld>(r.carrier_frequency_hz) + 0.5L * static_cast<ld>(r.bandwidth_hz));
  return sinc(static_cast<ld>(r.num_rx) * static_cast<ld>(r.rx_spacing_y_m) * (std::sin(theta) - std::sin(az)) /
              lambda);
}

inline ld g_el(ld el, ld psi, const aoasim::RadarConfig& r) {
  const ld lambda = kC0 / (static_cast<ld>(r.carrier_frequency_hz) + 0.5L * static_cast<ld>(r.bandwidth_hz));
  return sinc(static_cast<ld>(r.num_tx) * static_cast<ld>(r.tx_spacing_z_m) * (std::sin(psi) - std::sin(el)) /
              lambda);
}

// Central finite difference in extended precision.
template <typename F>
ld central_difference(F f, ld x, ld h) {
  return (f(x + h) - f(x - h)) / (2.0L * h);
}

// Transmit phase by trapezoidal integration of the instantaneous frequency f_c + B t / T.
inline ld chirp_phase_trapezoid(ld t, const aoasim::RadarConfig& r, std::size_t steps) {
  const ld fc = r.carrier_frequency_hz, slope = static_cast<ld>(r.bandwidth_hz) / r.chirp_period_s;
  const ld h = t / static_cast<ld>(steps);
  ld acc = 0.0L;
  for (std::size_t i = 0; i < steps; ++i) {
    const ld a = h * static_cast<ld>(i), b = a + h;
    acc += 0.5L * h * ((fc + slope * a) + (fc + slope * b));
  }
  return 2.0L * kPiL * acc;
}

// Receive delay from the exact distance to a source far out along (theta, psi). The element
// sits at (0, -y, -z) so that delay grows with y and z, the sign convention of the model.
inline ld far_field_delay(ld range, ld theta, ld psi, ld y, ld z, ld distance) {
  const ld px = distance * std::cos(psi) * std::cos(theta);
  const ld py = distance * std::cos(psi) * std::sin(theta);
  const ld pz = distance * std::sin(psi);
  const ld d = std::sqrt(px * px + (py + y) * (py + y) + (pz + z) * (pz + z));
  return (range + (d - distance)) / kC0;
}

// One-pass running mean.
struct StreamingMean {
  double mean = 0.0;
  std::size_t n = 0;
  void add(double x) {
    ++n;
    mean += (x - mean) / static_cast<double>(n);
  }
};

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace oracle
