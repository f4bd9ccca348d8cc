// SPDX-License-Identifier: Apache-2.0
#include <aoasim/core_model.hpp>
#include <aoasim/error.hpp>

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

}  // namespace

TEST_CASE("wavelength of a 77 GHz carrier", "[core_model]") {
  CHECK(wavelength(77e9) == Approx(3.8934e-3).epsilon(1e-4));
  CHECK(wavelength(77e9) == Approx(299792458.0 / 77e9).epsilon(1e-15));
}

TEST_CASE("wavelength at c0 hertz is one metre", "[core_model]") { CHECK(wavelength(kSpeedOfLight) == 1.0); }

TEST_CASE("wavelength halves when frequency doubles", "[core_model]") {
  CHECK(wavelength(38.5e9) == Approx(2.0 * wavelength(77e9)).epsilon(1e-15));
}

TEST_CASE("wavelength rejects non-positive frequencies", "[core_model]") {
  CHECK(code_of([] { wavelength(0.0); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { wavelength(-1.0); }) == ErrorCode::invalid_config);
}

TEST_CASE("wavelength is strictly decreasing in frequency", "[core_model]") {
  auto rng = oracle::rng(11);
  std::uniform_real_distribution<double> f(1e6, 3e11);
  for (int i = 0; i < 1000; ++i) {
    double a = f(rng), b = f(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(wavelength(a) > wavelength(b));
  }
}

TEST_CASE("steering wavelength follows the chirp centre by default", "[core_model]") {
  RadarConfig r;
  CHECK(r.steering_wavelength() == wavelength(77.5e9));
  r.steering = SteeringReference::carrier;
  CHECK(r.steering_wavelength() == wavelength(77e9));
  CHECK(RadarConfig{}.rx_spacing_y_m == Approx(0.5 * wavelength(77.5e9)).epsilon(1e-15));
  CHECK(RadarConfig{}.tx_spacing_z_m == Approx(0.5 * wavelength(77.5e9)).epsilon(1e-15));
}

TEST_CASE("reducing an ideal square returns its corners", "[core_model]") {
  const auto l = FrontEndLayout::square(deg(-5), deg(5), deg(-8), deg(8));
  const auto r = reduce_layout(l);
  CHECK(r.left == deg(-5));
  CHECK(r.right == deg(5));
  CHECK(r.bottom == deg(-8));
  CHECK(r.top == deg(8));
  for (const auto& res : r.residuals) CHECK(res.radians() == 0.0);
}

TEST_CASE("reducing the bench layout gives pair means and residuals", "[core_model]") {
  const auto r = reduce_layout(FrontEndLayout::bench());
  CHECK(r.left.degrees() == Approx(-4.4).margin(1e-12));
  CHECK(r.right.degrees() == Approx(4.15).margin(1e-12));
  CHECK(r.bottom.degrees() == Approx(-8.25).margin(1e-12));
  CHECK(r.top.degrees() == Approx(9.15).margin(1e-12));
  const double expected[] = {2.0, 0.7, 1.1, 1.5};
  for (int i = 0; i < 4; ++i) CHECK(r.residuals[i].degrees() == Approx(expected[i]).margin(1e-12));
}

TEST_CASE("a collapsed square is a degenerate layout", "[core_model]") {
  auto l = FrontEndLayout::square(deg(-5), deg(5), deg(-8), deg(8));
  for (auto& fe : l.front_ends) fe.azimuth = deg(1.0);
  CHECK(code_of([&] { reduce_layout(l); }) == ErrorCode::degenerate_layout);
  auto swapped = FrontEndLayout::square(deg(5), deg(-5), deg(-8), deg(8));
  CHECK(code_of([&] { reduce_layout(swapped); }) == ErrorCode::degenerate_layout);
}

TEST_CASE("reduce_layout rejects angles outside the open hemisphere", "[core_model]") {
  auto l = FrontEndLayout::bench();
  l.front_ends[3].elevation = deg(90.0);
  CHECK(code_of([&] { reduce_layout(l); }) == ErrorCode::invalid_config);
}

TEST_CASE("symmetric layouts reduce exactly with zero residuals", "[core_model]") {
  auto rng = oracle::rng(5);
  std::uniform_real_distribution<double> lo(-40.0, -0.1), hi(0.1, 40.0);
  for (int i = 0; i < 500; ++i) {
    const Angle l = deg(lo(rng)), r = deg(hi(rng)), b = deg(lo(rng)), t = deg(hi(rng));
    const auto red = reduce_layout(FrontEndLayout::square(l, r, b, t));
    REQUIRE(red.left == l);
    REQUIRE(red.right == r);
    REQUIRE(red.bottom == b);
    REQUIRE(red.top == t);
    for (const auto& res : red.residuals) REQUIRE(res.radians() == 0.0);
  }
}

TEST_CASE("ideal square is centred with the reduced spans", "[core_model]") {
  const auto sq = ideal_square(FrontEndLayout::bench());
  const auto r = reduce_layout(sq);
  CHECK(r.left.degrees() == Approx(-4.275).margin(1e-12));
  CHECK(r.right.degrees() == Approx(4.275).margin(1e-12));
  CHECK(r.bottom.degrees() == Approx(-8.7).margin(1e-12));
  CHECK(r.top.degrees() == Approx(8.7).margin(1e-12));
}

TEST_CASE("default scenario validates cleanly", "[core_model]") {
  CHECK(validate_scenario(ScenarioConfig{}).empty());
  CHECK(validate_scenario(ScenarioConfig{}, true).empty());
}

TEST_CASE("zero receive elements yields one diagnostic on num_rx", "[core_model]") {
  ScenarioConfig s;
  s.radar.num_rx = 0;
  const auto d = validate_scenario(s);
  REQUIRE(d.size() == 1);
  CHECK(d[0].field == "radar.num_rx");
  CHECK(d[0].severity == Severity::error);
  CHECK_FALSE(d[0].rule.empty());
}

TEST_CASE("vertical RX spacing warns only on the closed-form path", "[core_model]") {
  ScenarioConfig s;
  s.radar.rx_spacing_z_m = 1e-3;
  CHECK(validate_scenario(s).empty());
  const auto d = validate_scenario(s, true);
  REQUIRE(d.size() == 1);
  CHECK(d[0].field == "radar.rx_spacing_z_m");
  CHECK(d[0].severity == Severity::warning);
}

TEST_CASE("validation reports every violated field", "[core_model]") {
  ScenarioConfig s;
  s.radar.carrier_frequency_hz = -1.0;
  s.radar.num_samples = 1;
  s.rts.channels[2].attenuation = -0.5;
  s.rts.channels[1].delay_s = -1e-9;
  s.rts.intermediate_frequency_hz = 0.0;
  s.layout.front_ends[0].azimuth = deg(95.0);
  const auto d = validate_scenario(s);
  std::vector<std::string> fields;
  for (const auto& x : d) fields.push_back(x.field);
  for (const char* f : {"radar.carrier_frequency_hz", "radar.num_samples", "rts.channels[2].attenuation",
                        "rts.channels[1].delay_s", "rts.intermediate_frequency_hz", "layout.front_ends[0].azimuth"}) {
    CHECK(std::find(fields.begin(), fields.end(), f) != fields.end());
  }
  CHECK(d.size() == 6);
  CHECK(code_of([&] { require_valid(s); }) == ErrorCode::invalid_config);
}

TEST_CASE("validation is pure", "[core_model]") {
  ScenarioConfig s;
  s.radar.num_tx = 0;
  s.radar.tx_spacing_y_m = 1e-3;
  CHECK(validate_scenario(s, true) == validate_scenario(s, true));
}

TEST_CASE("wrap_phase maps into (-pi, pi]", "[core_model]") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(kPi) == Approx(kPi));
  CHECK(wrap_phase(-kPi) == Approx(kPi));
  CHECK(wrap_phase(3.0 * kPi / 2.0) == Approx(-kPi / 2.0));
  CHECK(wrap_phase(4.0 * kPi + 0.25) == Approx(0.25));
}
