// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <aoasim/core_model.hpp>

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aoasim {

using cdouble = std::complex<double>;

// Complex samples indexed [tx][rx][k], row-major.
class SampleCube {
 public:
  SampleCube() = default;
  SampleCube(std::size_t num_tx, std::size_t num_rx, std::size_t num_samples, double sample_rate_hz);

  std::size_t num_tx() const { return num_tx_; }
  std::size_t num_rx() const { return num_rx_; }
  std::size_t num_samples() const { return num_samples_; }
  double sample_rate_hz() const { return sample_rate_hz_; }

  cdouble& at(std::size_t tx, std::size_t rx, std::size_t k);
  const cdouble& at(std::size_t tx, std::size_t rx, std::size_t k) const;

  std::span<cdouble> series(std::size_t tx, std::size_t rx);
  std::span<const cdouble> series(std::size_t tx, std::size_t rx) const;

  std::vector<cdouble>& data() { return data_; }
  const std::vector<cdouble>& data() const { return data_; }

  std::string scenario_hash;  // hash of the generating scenario, empty if unknown

 private:
  std::size_t num_tx_ = 0, num_rx_ = 0, num_samples_ = 0;
  double sample_rate_hz_ = 0.0;
  std::vector<cdouble> data_;
};

// Same layout as SampleCube, sample axis replaced by DFT bin.
struct RangeSpectrum {
  SampleCube bins;
  double bin_resolution_hz = 0.0;
};

// Per-virtual-channel values [tx][rx], row-major.
struct ChannelValues {
  std::size_t num_tx = 0;
  std::size_t num_rx = 0;
  std::vector<cdouble> values;

  cdouble& at(std::size_t tx, std::size_t rx) { return values[tx * num_rx + rx]; }
  const cdouble& at(std::size_t tx, std::size_t rx) const { return values[tx * num_rx + rx]; }
};

struct PeakBin {
  std::size_t bin = 0;
  ChannelValues values;
};

struct ElementPosition {
  double y_m = 0.0;
  double z_m = 0.0;
};

double chirp_phase(double t_s, const RadarConfig& radar);

ElementPosition element_position(std::size_t n_tx, std::size_t n_rx, const RadarConfig& radar);

// Receive-leg delay tau_rx from front end q to an element at (y, z).
double return_delay(std::size_t q, double y_m, double z_m, const FrontEndLayout& layout);

// tau_tx + tau_rx + tau_rts for front end q and element (n_tx, n_rx).
double total_delay(std::size_t q, std::size_t n_tx, std::size_t n_rx, const ScenarioConfig& s);

// Beat samples of all active channels. Throws unsupported_range when a beat tone would alias.
SampleCube synthesize_cube(const ScenarioConfig& scenario);

RangeSpectrum range_dft(const SampleCube& cube, Window window = Window::rectangular);

// Range bin with the largest non-coherent magnitude sum and the channel values there.
PeakBin extract_peak_bin(const RangeSpectrum& spectrum);

// Channel values of every virtual channel at a fixed bin.
ChannelValues values_at_bin(const RangeSpectrum& spectrum, std::size_t bin);

}  // namespace aoasim
