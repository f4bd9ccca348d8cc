// SPDX-License-Identifier: Apache-2.0
#include <aoasim/error.hpp>
#include <aoasim/signal_chain.hpp>

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <random>

namespace aoasim {

SampleCube::SampleCube(std::size_t num_tx, std::size_t num_rx, std::size_t num_samples, double sample_rate_hz)
    : num_tx_(num_tx),
      num_rx_(num_rx),
      num_samples_(num_samples),
      sample_rate_hz_(sample_rate_hz),
      data_(num_tx * num_rx * num_samples) {}

cdouble& SampleCube::at(std::size_t tx, std::size_t rx, std::size_t k) {
  return data_[(tx * num_rx_ + rx) * num_samples_ + k];
}

const cdouble& SampleCube::at(std::size_t tx, std::size_t rx, std::size_t k) const {
  return data_[(tx * num_rx_ + rx) * num_samples_ + k];
}

std::span<cdouble> SampleCube::series(std::size_t tx, std::size_t rx) {
  return {data_.data() + (tx * num_rx_ + rx) * num_samples_, num_samples_};
}

std::span<const cdouble> SampleCube::series(std::size_t tx, std::size_t rx) const {
  return {data_.data() + (tx * num_rx_ + rx) * num_samples_, num_samples_};
}

double chirp_phase(double t_s, const RadarConfig& radar) {
  if (!(t_s >= 0.0 && t_s <= radar.chirp_period_s)) {
    throw Error(ErrorCode::domain, "time outside the chirp");
  }
  return 2.0 * kPi * (radar.carrier_frequency_hz * t_s + 0.5 * radar.slope() * t_s * t_s);
}

ElementPosition element_position(std::size_t n_tx, std::size_t n_rx, const RadarConfig& radar) {
  if (n_tx >= radar.num_tx || n_rx >= radar.num_rx) {
    throw Error(ErrorCode::index_out_of_range, "antenna element index out of range");
  }
  const double t = static_cast<double>(n_tx);
  const double r = static_cast<double>(n_rx);
  return {radar.tx_spacing_y_m * t + radar.rx_spacing_y_m * r,
          radar.tx_spacing_z_m * t + radar.rx_spacing_z_m * r};
}

double return_delay(std::size_t q, double y_m, double z_m, const FrontEndLayout& layout) {
  if (q >= kNumChannels) throw Error(ErrorCode::index_out_of_range, "channel index out of range");
  const double th = layout.front_ends[q].azimuth.radians();
  const double ps = layout.front_ends[q].elevation.radians();
  return (layout.range_m + y_m * std::sin(th) * std::cos(ps) + z_m * std::sin(ps)) / kSpeedOfLight;
}

double total_delay(std::size_t q, std::size_t n_tx, std::size_t n_rx, const ScenarioConfig& s) {
  const auto pos = element_position(n_tx, n_rx, s.radar);
  const double tau_tx = s.layout.range_m / kSpeedOfLight;
  return tau_tx + return_delay(q, pos.y_m, pos.z_m, s.layout) + s.rts.channels[q].delay_s;
}

SampleCube synthesize_cube(const ScenarioConfig& s) {
  require_valid(s);
  const auto& r = s.radar;
  const double fs = r.effective_sample_rate();
  SampleCube cube(r.num_tx, r.num_rx, r.num_samples, fs);
  const double slope = r.slope();
  const double f_rts = s.rts.intermediate_frequency_hz;

  for (std::size_t q = 0; q < kNumChannels; ++q) {
    const auto& ch = s.rts.channels[q];
    const double amp = ch.attenuation * ch.hardware_gain;
    if (amp == 0.0) continue;
    for (std::size_t t = 0; t < r.num_tx; ++t) {
      for (std::size_t e = 0; e < r.num_rx; ++e) {
        const double tau = total_delay(q, t, e, s);
        const double tau_c = tau - ch.delay_s;
        if (slope * tau > 0.5 * fs) {
          throw Error(ErrorCode::unsupported_range, "beat frequency exceeds half the sample rate");
        }
        // Mixed-chirp phase with the RTS delay line running at the intermediate frequency:
        // phi_tx(t) - phi_tx(t - tau) - 2 pi (f_c - f_rts) tau_rts, in cycles.
        const double c0 = std::fmod(r.carrier_frequency_hz * tau_c + f_rts * ch.delay_s -
                                        0.5 * slope * tau * tau,
                                    1.0);
        const double dc = slope * tau / fs;  // cycles per sample
        const double offset = ch.phase_offset_rad;
        auto out = cube.series(t, e);
        for (std::size_t k = 0; k < r.num_samples; ++k) {
          const double phase = 2.0 * kPi * (c0 + dc * static_cast<double>(k)) + offset;
          out[k] += std::polar(amp, phase);
        }
      }
    }
  }

  if (s.processing.snr_db) {
    double power = 0.0;
    for (const auto& v : cube.data()) power += std::norm(v);
    power /= static_cast<double>(cube.data().size());
    const double sigma = std::sqrt(0.5 * power / std::pow(10.0, *s.processing.snr_db / 10.0));
    std::mt19937_64 rng(s.processing.noise_seed);
    std::normal_distribution<double> n(0.0, sigma);
    for (auto& v : cube.data()) v += cdouble(n(rng), n(rng));
  }
  return cube;
}

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RangeSpectrum range_dft(const SampleCube& cube, Window window) {
  const std::size_t n = cube.num_samples();
  const std::size_t howmany = cube.num_tx() * cube.num_rx();
  RangeSpectrum out{SampleCube(cube.num_tx(), cube.num_rx(), n, cube.sample_rate_hz()),
                    n ? cube.sample_rate_hz() / static_cast<double>(n) : 0.0};
  out.bins.scenario_hash = cube.scenario_hash;
  if (n == 0 || howmany == 0) return out;

  std::vector<cdouble> in = cube.data();
  if (window == Window::hann) {
    for (std::size_t c = 0; c < howmany; ++c) {
      for (std::size_t k = 0; k < n; ++k) {
        in[c * n + k] *= 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
      }
    }
  }
  auto* src = reinterpret_cast<fftw_complex*>(in.data());
  auto* dst = reinterpret_cast<fftw_complex*>(out.bins.data().data());
  const int len = static_cast<int>(n);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_many_dft(1, &len, static_cast<int>(howmany), src, nullptr, 1, len, dst, nullptr, 1, len,
                              FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

ChannelValues values_at_bin(const RangeSpectrum& spectrum, std::size_t bin) {
  const auto& b = spectrum.bins;
  if (bin >= b.num_samples()) throw Error(ErrorCode::index_out_of_range, "range bin out of range");
  ChannelValues v{b.num_tx(), b.num_rx(), std::vector<cdouble>(b.num_tx() * b.num_rx())};
  for (std::size_t t = 0; t < b.num_tx(); ++t) {
    for (std::size_t e = 0; e < b.num_rx(); ++e) v.at(t, e) = b.at(t, e, bin);
  }
  return v;
}

PeakBin extract_peak_bin(const RangeSpectrum& spectrum) {
  const auto& b = spectrum.bins;
  std::vector<double> sum(b.num_samples(), 0.0);
  for (std::size_t t = 0; t < b.num_tx(); ++t) {
    for (std::size_t e = 0; e < b.num_rx(); ++e) {
      const auto s = b.series(t, e);
      for (std::size_t k = 0; k < s.size(); ++k) sum[k] += std::abs(s[k]);
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < sum.size(); ++k) {
    if (sum[k] > sum[best]) best = k;
  }
  if (sum.empty() || !(sum[best] > 0.0)) throw Error(ErrorCode::no_detection, "spectrum is all zero");
  return {best, values_at_bin(spectrum, best)};
}

}  // namespace aoasim
