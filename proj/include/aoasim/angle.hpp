// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <numbers>

namespace aoasim {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

// Plane angle. Stored in radians; degrees only at the edges (files, CLI, reports).
class Angle {
 public:
  constexpr Angle() = default;

  static constexpr Angle from_radians(double r) { return Angle(r); }
  static constexpr Angle from_degrees(double d) { return Angle(d * (kPi / 180.0)); }

  constexpr double radians() const { return rad_; }
  constexpr double degrees() const { return rad_ * (180.0 / kPi); }

  constexpr Angle operator-() const { return Angle(-rad_); }
  constexpr Angle operator+(Angle o) const { return Angle(rad_ + o.rad_); }
  constexpr Angle operator-(Angle o) const { return Angle(rad_ - o.rad_); }

  friend constexpr auto operator<=>(const Angle&, const Angle&) = default;

 private:
  explicit constexpr Angle(double r) : rad_(r) {}
  double rad_ = 0.0;
};

constexpr Angle deg(double d) { return Angle::from_degrees(d); }
constexpr Angle rad(double r) { return Angle::from_radians(r); }

// Azimuth/elevation pair. Used for front-end positions, set points and estimates.
struct AnglePair {
  Angle azimuth;
  Angle elevation;
  friend constexpr bool operator==(const AnglePair&, const AnglePair&) = default;
};

using TargetAngle = AnglePair;

// Wrap a phase into (-pi, pi].
double wrap_phase(double phi);

}  // namespace aoasim
