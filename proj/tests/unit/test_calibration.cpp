// SPDX-License-Identifier: Apache-2.0
#include <aoasim/calibration.hpp>
#include <aoasim/error.hpp>
#include <aoasim/experiment.hpp>
#include <aoasim/superposition_solver.hpp>

#include <catch_amalgamated.hpp>

#include "support/oracles.hpp"

using namespace aoasim;
using Catch::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an aoasim::Error");
  return ErrorCode::io;
}

// Angular frequency of the delay-to-phase map of an RTS channel.
double phase_rate(const ScenarioConfig& s) {
  return 2.0 * kPi * (s.rts.intermediate_frequency_hz + 0.5 * s.radar.bandwidth_hz);
}

// Distance between two delays modulo the wrap period.
double wrapped_distance(double a, double b, double period) {
  const double d = std::remainder(a - b, period);
  return std::abs(d);
}

ScenarioConfig hidden_phases(std::uint64_t seed) {
  auto s = with_coherent_phases(ScenarioConfig{});
  auto rng = oracle::rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (auto& ch : s.rts.channels) ch.phase_offset_rad += u(rng);
  return s;
}

CalibrationSweep fake_sweep(std::size_t ref, std::size_t swept, double chosen, double period = 1e-9) {
  CalibrationSweep s;
  s.ref = ref;
  s.swept = swept;
  s.wrap_period_s = period;
  s.offsets_s = {chosen};
  s.angle_errors_deg = {0.0};
  s.valid = {true};
  s.chosen_offset_s = chosen;
  return s;
}

// Full-chain error at the centre of the measured rectangle.
double midpoint_error(const ScenarioConfig& s, const CalibrationTable* table) {
  const auto l = reduce_layout(s.layout);
  const TargetAngle t{rad(0.5 * (l.left + l.right).radians()), rad(0.5 * (l.bottom + l.top).radians())};
  const auto rec = run_point(t, s, l, table);
  REQUIRE(rec.estimate);
  return std::hypot(rec.estimate->azimuth_error.degrees(), rec.estimate->elevation_error.degrees());
}

}  // namespace

TEST_CASE("pairs are monitored on their shared axis", "[calibration]") {
  CHECK(pair_axis(0, 1) == Axis::azimuth);
  CHECK(pair_axis(3, 2) == Axis::azimuth);
  CHECK(pair_axis(0, 2) == Axis::elevation);
  CHECK(pair_axis(1, 3) == Axis::elevation);
  CHECK(code_of([] { pair_axis(0, 3); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { pair_axis(1, 1); }) == ErrorCode::invalid_config);
}

TEST_CASE("wrap period is the inverse of f_rts plus half the bandwidth", "[calibration]") {
  ScenarioConfig s;
  CHECK(s.rts.wrap_period_s(s.radar) == Approx(1.0 / (500e6 + 0.5e9)).epsilon(1e-15));
}

TEST_CASE("a coherent pair needs no offset", "[calibration]") {
  const auto s = with_coherent_phases(ScenarioConfig{});
  for (const auto& [ref, swept] : kDefaultPairs) {
    const auto sw = run_sweep(s, ref, swept);
    REQUIRE(sw.offsets_s.size() == 201u);
    REQUIRE(sw.angle_errors_deg.size() == sw.offsets_s.size());
    REQUIRE(sw.valid.size() == sw.offsets_s.size());
    for (std::size_t i = 1; i < sw.offsets_s.size(); ++i) REQUIRE(sw.offsets_s[i] > sw.offsets_s[i - 1]);
    REQUIRE(std::find(sw.offsets_s.begin(), sw.offsets_s.end(), sw.chosen_offset_s) != sw.offsets_s.end());
    const double step = sw.offsets_s[1] - sw.offsets_s[0];
    CHECK(wrapped_distance(sw.chosen_offset_s, 0.0, sw.wrap_period_s) <= step * (1.0 + 1e-9));
  }
}

TEST_CASE("a hidden phase on the swept channel is inverted by the sweep", "[calibration]") {
  const auto base = with_coherent_phases(ScenarioConfig{});
  for (double dphi : {0.7, 2.0, -2.6}) {
    auto s = base;
    s.rts.channels[1].phase_offset_rad += dphi;
    const auto sw = run_sweep(s, 0, 1);
    const double step = sw.offsets_s[1] - sw.offsets_s[0];
    // Delay adds phase at rate 2 pi (f_rts + B/2), so the compensating offset is -dphi over that rate.
    const double expected = -dphi / phase_rate(s);
    CHECK(wrapped_distance(sw.chosen_offset_s, expected, sw.wrap_period_s) <= step * (1.0 + 1e-9));
  }
}

TEST_CASE("a sweep over two wrap periods shows two minima one period apart", "[calibration]") {
  auto s = hidden_phases(7);
  const auto sw = run_sweep(s, 0, 1);
  const double step = sw.offsets_s[1] - sw.offsets_s[0];
  const auto period = estimate_sweep_period(sw);
  REQUIRE(period);
  CHECK(std::abs(*period - 1.0 / (500e6 + 0.5e9)) <= step * (1.0 + 1e-9));
}

TEST_CASE("the error curve repeats after one wrap period", "[calibration]") {
  const auto s = hidden_phases(11);
  const auto sw = run_sweep(s, 0, 2);
  const std::size_t shift = 100;  // 201 points over two periods
  REQUIRE(sw.offsets_s[shift] - sw.offsets_s[0] == Approx(sw.wrap_period_s).epsilon(1e-12));
  double worst = 0.0;
  for (std::size_t i = 0; i + shift < sw.offsets_s.size(); ++i) {
    if (!sw.valid[i] || !sw.valid[i + shift]) continue;
    worst = std::max(worst, std::abs(sw.angle_errors_deg[i] - sw.angle_errors_deg[i + shift]));
  }
  UNSCOPED_INFO("largest one-period change of the error curve " << worst << " deg");
  CHECK(worst < 0.1);
}

TEST_CASE("a sweep wide enough to move the tone flags bin migration", "[calibration]") {
  const auto s = hidden_phases(3);
  SweepSettings wide;
  wide.span_s = 20e-9;
  wide.steps = 41;
  const auto sw = run_sweep(s, 0, 1, wide);
  CHECK(sw.bin_migration);
  CHECK(std::find(sw.valid.begin(), sw.valid.end(), false) != sw.valid.end());
  CHECK(sw.valid[sw.offsets_s.size() / 2]);
  const auto pick = std::find(sw.offsets_s.begin(), sw.offsets_s.end(), sw.chosen_offset_s) - sw.offsets_s.begin();
  CHECK(sw.valid[static_cast<std::size_t>(pick)]);
}

TEST_CASE("sweep settings are validated", "[calibration]") {
  SweepSettings bad;
  bad.steps = 1;
  CHECK(code_of([&] { run_sweep(ScenarioConfig{}, 0, 1, bad); }) == ErrorCode::invalid_config);
  bad = {};
  bad.swept_weight = 0.0;
  CHECK(code_of([&] { run_sweep(ScenarioConfig{}, 0, 1, bad); }) == ErrorCode::invalid_config);
}

TEST_CASE("zero chosen offsets build the identity table", "[calibration]") {
  const auto t = build_calibration({fake_sweep(0, 1, 0.0), fake_sweep(0, 2, 0.0), fake_sweep(2, 3, 0.0)});
  for (std::size_t q = 0; q < kNumChannels; ++q) {
    CHECK(t.delay_offsets_s[q] == 0.0);
    CHECK(t.gains[q] == 1.0);
  }
}

TEST_CASE("offsets compose along the pair chain", "[calibration]") {
  const double p = 1e-9;
  const auto t = build_calibration({fake_sweep(0, 1, 0.2e-9, p), fake_sweep(0, 2, 0.1e-9, p), fake_sweep(2, 3, 0.3e-9, p)});
  CHECK(t.delay_offsets_s[0] == Approx(0.0).margin(1e-21));
  CHECK(t.delay_offsets_s[1] == Approx(0.2e-9).epsilon(1e-12));
  CHECK(t.delay_offsets_s[2] == Approx(0.1e-9).epsilon(1e-12));
  CHECK(t.delay_offsets_s[3] == Approx(0.4e-9).epsilon(1e-12));
}

TEST_CASE("a pair recorded in reverse composes with the opposite sign", "[calibration]") {
  const double p = 1e-9;
  const auto t = build_calibration({fake_sweep(0, 1, 0.2e-9, p), fake_sweep(1, 3, 0.1e-9, p), fake_sweep(2, 0, 0.25e-9, p)});
  // tau = {0, 0.2, -0.25, 0.3} ns, wrapped into the tightest cyclic window and shifted to start at 0.
  std::array<double, 4> tau{0.0, 0.2e-9, 0.75e-9, 0.3e-9};
  const double lo = 0.75e-9 - p;
  for (std::size_t q = 0; q < 4; ++q) {
    const double want = tau[q] >= 0.75e-9 ? tau[q] - 0.75e-9 : tau[q] - lo;
    CHECK(t.delay_offsets_s[q] == Approx(want).margin(1e-18));
  }
}

TEST_CASE("table offsets are non-negative and equivalent modulo the period", "[calibration]") {
  auto rng = oracle::rng(83);
  std::uniform_real_distribution<double> u(-3e-9, 3e-9);
  const double p = 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const auto t = build_calibration({fake_sweep(0, 1, a, p), fake_sweep(0, 2, b, p), fake_sweep(2, 3, c, p)});
    const double want[4] = {0.0, a, b, b + c};
    double mn = 1.0, mx = -1.0;
    for (std::size_t q = 0; q < 4; ++q) {
      REQUIRE(t.delay_offsets_s[q] >= 0.0);
      mn = std::min(mn, t.delay_offsets_s[q]);
      mx = std::max(mx, t.delay_offsets_s[q]);
      REQUIRE(wrapped_distance(t.delay_offsets_s[q] - t.delay_offsets_s[0], want[q], p) < 1e-18);
    }
    REQUIRE(mn == 0.0);
    REQUIRE(mx < p);
  }
}

TEST_CASE("sweeps that leave a channel unconnected are rejected", "[calibration]") {
  CHECK(code_of([] { build_calibration({fake_sweep(0, 1, 0.0)}); }) == ErrorCode::incomplete_calibration);
  CHECK(code_of([] { build_calibration({fake_sweep(0, 1, 0.0), fake_sweep(2, 3, 0.0)}); }) ==
        ErrorCode::incomplete_calibration);
  CHECK(code_of([] { build_calibration({}); }) == ErrorCode::incomplete_calibration);
}

TEST_CASE("applying a table adds its delays and gains scale commanded attenuations", "[calibration]") {
  ScenarioConfig s;
  s.rts.channels[2].delay_s = 1e-9;
  CalibrationTable t;
  t.delay_offsets_s = {0.0, 0.1e-9, 0.2e-9, 0.3e-9};
  t.gains = {1.0, 2.0, 1.5, 1.0};
  const auto c = apply_calibration(s, t);
  CHECK(c.rts.channels[0].delay_s == 0.0);
  CHECK(c.rts.channels[2].delay_s == Approx(1.2e-9));
  CHECK(c.rts.channels[3].delay_s == Approx(0.3e-9));
  const auto w = with_attenuations(c, {0.5, 0.5, 1.0, 0.0}, &t);
  CHECK(w.rts.channels[0].attenuation == 0.5);
  CHECK(w.rts.channels[1].attenuation == 1.0);
  CHECK(w.rts.channels[2].attenuation == 1.5);
  CHECK(w.rts.channels[3].attenuation == 0.0);
  CHECK(with_attenuations(c, {0.5, 0.5, 1.0, 0.0}).rts.channels[1].attenuation == 0.5);
}

TEST_CASE("gain equalization compensates a weak channel", "[calibration]") {
  ScenarioConfig s;
  const auto nominal = equalize_gains(s, CalibrationTable{});
  for (double g : nominal.gains) CHECK(g == Approx(1.0).epsilon(1e-2));
  s.rts.channels[2].hardware_gain = 0.5;
  const auto weak = equalize_gains(s, CalibrationTable{});
  CHECK(*std::min_element(weak.gains.begin(), weak.gains.end()) == 1.0);
  CHECK(weak.gains[2] / weak.gains[0] == Approx(2.0 * nominal.gains[2] / nominal.gains[0]).epsilon(1e-9));
  CHECK(weak.gains[3] / weak.gains[0] == Approx(nominal.gains[3] / nominal.gains[0]).epsilon(1e-9));
}

TEST_CASE("calibration restores coherency and the midpoint angle", "[calibration]") {
  for (std::uint64_t seed : {7u, 19u}) {
    const auto s = hidden_phases(seed);
    const auto result = calibrate(s);
    REQUIRE(result.sweeps.size() == 3u);
    const double step_phase = (result.sweeps[0].offsets_s[1] - result.sweeps[0].offsets_s[0]) * phase_rate(s);
    const auto phases = direct_channel_phases(apply_calibration(s, result.table));
    // One sweep step of RF phase per link of the chain 0-1, 0-2, 0-2-3.
    CHECK(std::abs(wrap_phase(phases[1] - phases[0])) <= step_phase);
    CHECK(std::abs(wrap_phase(phases[2] - phases[0])) <= step_phase);
    CHECK(std::abs(wrap_phase(phases[3] - phases[0])) <= 2.0 * step_phase);
    CHECK(result.residual_coherency_rad == Approx(coherency_check(phases)).margin(1e-12));
    CHECK(result.residual_coherency_rad < deg(5.0).radians());

    const double before = midpoint_error(s, nullptr);
    const double after = midpoint_error(s, &result.table);
    UNSCOPED_INFO("seed " << seed << " midpoint error before " << before << " after " << after);
    CHECK(after * 10.0 <= before);
  }
}

TEST_CASE("a peak-magnitude sweep also lands near the coherent offset", "[calibration]") {
  const auto s = with_coherent_phases(ScenarioConfig{});
  SweepSettings st;
  st.metric = SweepMetric::peak_magnitude;
  const auto sw = run_sweep(s, 0, 1, st);
  CHECK(wrapped_distance(sw.chosen_offset_s, 0.0, sw.wrap_period_s) <= 0.1 * sw.wrap_period_s);
}

TEST_CASE("sweeps are deterministic", "[calibration]") {
  const auto s = hidden_phases(5);
  SweepSettings st;
  st.steps = 21;
  const auto a = run_sweep(s, 2, 3, st), b = run_sweep(s, 2, 3, st);
  CHECK(a.angle_errors_deg == b.angle_errors_deg);
  CHECK(a.chosen_offset_s == b.chosen_offset_s);
}
