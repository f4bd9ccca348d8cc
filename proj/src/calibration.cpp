// SPDX-License-Identifier: Apache-2.0
#include <aoasim/beamforming.hpp>
#include <aoasim/calibration.hpp>
#include <aoasim/error.hpp>
#include <aoasim/signal_chain.hpp>
#include <aoasim/superposition_solver.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>

namespace aoasim {

namespace {
constexpr double kCoherentMagnitudeFraction = 0.75;
}  // namespace

Axis pair_axis(std::size_t ref, std::size_t swept) {
  if (ref >= kNumChannels || swept >= kNumChannels || ref == swept) {
    throw Error(ErrorCode::invalid_config, "calibration pair needs two distinct channels");
  }
  const auto [a, b] = std::minmax(ref, swept);
  if ((a == 0 && b == 1) || (a == 2 && b == 3)) return Axis::azimuth;
  if ((a == 0 && b == 2) || (a == 1 && b == 3)) return Axis::elevation;
  throw Error(ErrorCode::invalid_config, "calibration pair must share a row or a column");
}

ScenarioConfig with_attenuations(const ScenarioConfig& s, const std::array<double, kNumChannels>& a,
                                 const CalibrationTable* table) {
  ScenarioConfig out = s;
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    out.rts.channels[q].attenuation = a[q] * (table ? table->gains[q] : 1.0);
  }
  return out;
}

namespace {

std::array<double, kNumChannels> only(std::size_t q, double value = 1.0) {
  std::array<double, kNumChannels> a{};
  a[q] = value;
  return a;
}

double magnitude_at(const RangeSpectrum& spec, std::size_t bin) {
  double sum = 0.0;
  for (const auto& v : values_at_bin(spec, bin).values) sum += std::abs(v);
  return sum;
}

// Beam grid for a pair: full extent on the monitored axis, a window around the pair on the other.
AngleGrid pair_grid(const ScenarioConfig& s, std::size_t ref, std::size_t swept, Axis axis) {
  AngleGrid g = s.processing.grid;
  const auto& a = s.layout.front_ends[ref];
  const auto& b = s.layout.front_ends[swept];
  constexpr double window = 3.0;
  if (axis == Axis::azimuth) {
    const double mid = 0.5 * (a.elevation.degrees() + b.elevation.degrees());
    g.el_min_deg = std::max(g.el_min_deg, mid - window);
    g.el_max_deg = std::min(g.el_max_deg, mid + window);
  } else {
    const double mid = 0.5 * (a.azimuth.degrees() + b.azimuth.degrees());
    g.az_min_deg = std::max(g.az_min_deg, mid - window);
    g.az_max_deg = std::min(g.az_max_deg, mid + window);
  }
  return g;
}

// Peak angle on the monitored axis of the coherent (1, r) pair, from exact array geometry.
double coherent_pair_angle(const ScenarioConfig& s, std::size_t ref, std::size_t swept, double r,
                           const AngleGrid& grid) {
  const ScenarioConfig aligned = with_coherent_phases(s);
  ChannelValues x{s.radar.num_tx, s.radar.num_rx, std::vector<cdouble>(s.radar.num_tx * s.radar.num_rx)};
  for (const auto& [q, w] : {std::pair{ref, 1.0}, std::pair{swept, r}}) {
    const auto& ch = aligned.rts.channels[q];
    const auto pw = plane_wave_values(s.layout.front_ends[q], s.radar, std::polar(w, ch.phase_offset_rad));
    for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] += pw.values[i];
  }
  const auto est = estimate_angle(beamform_direct(x, s.radar, grid));
  return pair_axis(ref, swept) == Axis::azimuth ? est.azimuth.degrees() : est.elevation.degrees();
}

// The score is even around the coherent offset, so its minimum is flat. Fit a parabola to the
// valid points within +/- half_width of the current pick, recentre, and return the sample
// nearest to the vertex.
std::size_t refine_extremum(const std::vector<double>& x, const std::vector<double>& y, const std::vector<bool>& valid,
                            std::size_t pick, double half_width) {
  if (!(half_width > 0.0)) return pick;
  double centre = x[pick];
  for (int iter = 0; iter < 3; ++iter) {
    // Least squares in t = x - centre for y = a t^2 + b t + c.
    double s[5] = {}, sy[3] = {};
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = x[i] - centre;
      if (!valid[i] || std::abs(t) > half_width) continue;
      double p = 1.0;
      for (int k = 0; k < 5; ++k, p *= t) {
        s[k] += p;
        if (k < 3) sy[k] += p * y[i];
      }
      ++n;
    }
    if (n < 5) return pick;
    // Normal equations [s4 s3 s2; s3 s2 s1; s2 s1 s0] [a b c] = [sy2 sy1 sy0].
    const double m[3][3] = {{s[4], s[3], s[2]}, {s[3], s[2], s[1]}, {s[2], s[1], s[0]}};
    const double v[3] = {sy[2], sy[1], sy[0]};
    auto det3 = [](const double a[3][3]) {
      return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
             a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double d = det3(m);
    if (d == 0.0) return pick;
    double ma[3][3], mb[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ma[i][j] = j == 0 ? v[i] : m[i][j];
        mb[i][j] = j == 1 ? v[i] : m[i][j];
      }
    }
    const double a = det3(ma) / d, b = det3(mb) / d;
    if (!(a > 0.0)) return pick;
    const double vertex = centre - 0.5 * b / a;
    if (std::abs(vertex - x[pick]) > half_width) return pick;
    const bool settled = std::abs(vertex - centre) < 1e-3 * half_width;
    centre = vertex;
    if (settled) break;
  }
  std::size_t best = pick;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (valid[i] && std::abs(x[i] - centre) < std::abs(x[best] - centre)) best = i;
  }
  return best;
}

}  // namespace

CalibrationSweep run_sweep(const ScenarioConfig& scenario, std::size_t ref, std::size_t swept,
                           const SweepSettings& settings) {
  require_valid(scenario);
  if (settings.steps < 2) throw Error(ErrorCode::invalid_config, "sweep needs at least two steps");
  if (!(settings.swept_weight > 0.0)) throw Error(ErrorCode::invalid_config, "swept weight must be positive");

  CalibrationSweep sweep;
  sweep.ref = ref;
  sweep.swept = swept;
  sweep.axis = pair_axis(ref, swept);
  sweep.wrap_period_s = scenario.rts.wrap_period_s(scenario.radar);
  const double span = settings.span_s > 0.0 ? settings.span_s : sweep.wrap_period_s;

  // Both channels get a common base delay so every swept delay stays non-negative.
  ScenarioConfig base = scenario;
  base.rts.channels[ref].delay_s += span;
  base.rts.channels[swept].delay_s += span;
  const Window window = scenario.processing.window;
  const RangeSpectrum x_ref = range_dft(synthesize_cube(with_attenuations(base, only(ref))), window);

  const AngleGrid grid = pair_grid(scenario, ref, swept, sweep.axis);
  const double r = settings.swept_weight;
  const double reference = coherent_pair_angle(scenario, ref, swept, r, grid);

  for (std::size_t i = 0; i < settings.steps; ++i) {
    const double offset = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(settings.steps - 1);
    ScenarioConfig point = base;
    point.rts.channels[swept].delay_s += offset;
    const RangeSpectrum x_sw = range_dft(synthesize_cube(with_attenuations(point, only(swept))), window);

    // Detection bin of the nominal pair, then balance the swept channel against the reference there.
    std::size_t bin = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < x_ref.bins.num_samples(); ++k) {
      double m = 0.0;
      for (std::size_t t = 0; t < x_ref.bins.num_tx(); ++t) {
        for (std::size_t e = 0; e < x_ref.bins.num_rx(); ++e) {
          m += std::abs(x_ref.bins.at(t, e, k) + r * x_sw.bins.at(t, e, k));
        }
      }
      if (m > best) {
        best = m;
        bin = k;
      }
    }
    const double gain = magnitude_at(x_ref, bin) / magnitude_at(x_sw, bin);
    const bool ok = std::isfinite(gain) && gain <= settings.max_gain;

    std::array<double, kNumChannels> a{};
    a[ref] = 1.0;
    a[swept] = r * (std::isfinite(gain) ? gain : 1.0);
    const auto spec = range_dft(synthesize_cube(with_attenuations(point, a)), window);
    const auto peak = extract_peak_bin(spec);
    const auto est = estimate_angle(beamform_direct(peak.values, scenario.radar, grid));
    const double angle = sweep.axis == Axis::azimuth ? est.azimuth.degrees() : est.elevation.degrees();

    sweep.offsets_s.push_back(offset);
    sweep.angle_errors_deg.push_back(angle - reference);
    sweep.peak_magnitudes.push_back(est.peak_magnitude);
    sweep.valid.push_back(ok);
    sweep.bin_migration = sweep.bin_migration || !ok;
  }

  const bool by_error = settings.metric == SweepMetric::angle_error;
  std::vector<double> score(settings.steps);
  for (std::size_t i = 0; i < settings.steps; ++i) {
    score[i] = by_error ? std::abs(sweep.angle_errors_deg[i]) : -sweep.peak_magnitudes[i];
  }
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < settings.steps; ++i) {
    if (sweep.valid[i] && (!pick || score[i] < score[*pick])) pick = i;
  }
  if (pick) pick = refine_extremum(sweep.offsets_s, score, sweep.valid, *pick, settings.fit_half_width * sweep.wrap_period_s);
  sweep.chosen_offset_s = sweep.offsets_s[*pick];
  return sweep;
}

std::optional<double> estimate_sweep_period(const CalibrationSweep& sweep, double max_error_deg) {
  const std::size_t n = sweep.offsets_s.size();
  if (n < 3 || !(sweep.wrap_period_s > 0.0)) return std::nullopt;
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = std::abs(sweep.angle_errors_deg[i]);

  // Interior minima of |error| that come close to zero with both neighbours valid. The error also
  // crosses zero near anti-coherence, where the pair mostly cancels, so minima must keep most of
  // the strongest valid peak magnitude.
  double strongest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sweep.valid[i]) strongest = std::max(strongest, sweep.peak_magnitudes[i]);
  }
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!sweep.valid[i] || !sweep.valid[i - 1] || !sweep.valid[i + 1] || score[i] > max_error_deg) continue;
    if (sweep.peak_magnitudes[i] < kCoherentMagnitudeFraction * strongest) continue;
    if (score[i] <= score[i - 1] && score[i] <= score[i + 1]) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](auto a, auto b) { return score[a] < score[b]; });
  if (minima.empty()) return std::nullopt;
  const double half_width = 0.15 * sweep.wrap_period_s;
  const std::size_t first = refine_extremum(sweep.offsets_s, score, sweep.valid, minima.front(), half_width);
  for (std::size_t k = 1; k < minima.size(); ++k) {
    if (std::abs(sweep.offsets_s[minima[k]] - sweep.offsets_s[first]) < 0.5 * sweep.wrap_period_s) continue;
    const std::size_t second = refine_extremum(sweep.offsets_s, score, sweep.valid, minima[k], half_width);
    return std::abs(sweep.offsets_s[second] - sweep.offsets_s[first]);
  }
  return std::nullopt;
}

CalibrationTable build_calibration(const std::vector<CalibrationSweep>& sweeps) {
  std::array<std::optional<double>, kNumChannels> tau{};
  tau[0] = 0.0;
  double period = 0.0;
  for (const auto& s : sweeps) period = std::max(period, s.wrap_period_s);

  std::queue<std::size_t> open;
  open.push(0);
  while (!open.empty()) {
    const std::size_t q = open.front();
    open.pop();
    for (const auto& s : sweeps) {
      if (s.ref == q && !tau[s.swept]) {
        tau[s.swept] = *tau[q] + s.chosen_offset_s;
        open.push(s.swept);
      } else if (s.swept == q && !tau[s.ref]) {
        tau[s.ref] = *tau[q] - s.chosen_offset_s;
        open.push(s.ref);
      }
    }
  }
  for (const auto& t : tau) {
    if (!t) throw Error(ErrorCode::incomplete_calibration, "sweeps do not connect every channel to channel 0");
  }

  CalibrationTable table;
  if (!(period > 0.0)) {
    const double lo = std::min({*tau[0], *tau[1], *tau[2], *tau[3]});
    for (std::size_t q = 0; q < kNumChannels; ++q) table.delay_offsets_s[q] = *tau[q] - lo;
    return table;
  }

  // Delays only matter modulo the wrap period for phase; pick the representatives with the
  // smallest spread so all channels stay in the same range bin.
  std::array<double, kNumChannels> wrapped{};
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    wrapped[q] = *tau[q] - period * std::floor(*tau[q] / period);
  }
  std::array<std::size_t, kNumChannels> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return wrapped[a] < wrapped[b]; });
  std::size_t cut = 0;
  double best_spread = wrapped[order[3]] - wrapped[order[0]];
  for (std::size_t c = 1; c < kNumChannels; ++c) {
    const double spread = wrapped[order[c - 1]] + period - wrapped[order[c]];
    if (spread < best_spread) {
      best_spread = spread;
      cut = c;
    }
  }
  const double start = wrapped[order[cut]];
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    const double v = wrapped[q] >= start ? wrapped[q] : wrapped[q] + period;
    table.delay_offsets_s[q] = v - start;
  }
  return table;
}

ScenarioConfig apply_calibration(const ScenarioConfig& scenario, const CalibrationTable& table) {
  ScenarioConfig out = scenario;
  for (std::size_t q = 0; q < kNumChannels; ++q) out.rts.channels[q].delay_s += table.delay_offsets_s[q];
  return out;
}

CalibrationTable equalize_gains(const ScenarioConfig& scenario, CalibrationTable table) {
  const ScenarioConfig cal = apply_calibration(scenario, table);
  const Window window = scenario.processing.window;
  const std::size_t bin =
      extract_peak_bin(range_dft(synthesize_cube(with_attenuations(cal, {1.0, 1.0, 1.0, 1.0})), window)).bin;
  std::array<double, kNumChannels> mag{};
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    mag[q] = magnitude_at(range_dft(synthesize_cube(with_attenuations(cal, only(q))), window), bin);
    if (!(mag[q] > 0.0)) throw Error(ErrorCode::no_detection, "channel has no energy at the detection bin");
  }
  const double top = *std::max_element(mag.begin(), mag.end());
  for (std::size_t q = 0; q < kNumChannels; ++q) table.gains[q] = top / mag[q];
  return table;
}

CalibrationResult calibrate(const ScenarioConfig& scenario, const SweepSettings& settings,
                            const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  CalibrationResult result;
  for (const auto& [ref, swept] : pairs) result.sweeps.push_back(run_sweep(scenario, ref, swept, settings));
  result.table = equalize_gains(scenario, build_calibration(result.sweeps));
  result.residual_coherency_rad = coherency_check(direct_channel_phases(apply_calibration(scenario, result.table)));
  return result;
}

}  // namespace aoasim
