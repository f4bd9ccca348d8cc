// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <aoasim/core_model.hpp>
#include <aoasim/signal_chain.hpp>

#include <array>

namespace aoasim {

// Axis weights of the four-channel superposition. A_0..A_3 follow from per_channel().
struct AttenuationSet {
  double left = 1.0;
  double right = 0.0;
  double bottom = 1.0;
  double top = 0.0;
  bool extrapolated = false;  // target outside the front-end rectangle

  // {bottom*left, bottom*right, top*left, top*right}
  std::array<double, kNumChannels> per_channel() const;

  static AttenuationSet one_hot(std::size_t q);
};

struct PeakSearch {
  double min_deg = -15.0;
  double max_deg = 15.0;
  double coarse_step_deg = 0.1;
  double tolerance_deg = 1e-4;
};

// Derivatives of g_az / g_el with respect to the look angle, per radian.
double dg_az(Angle az, Angle theta_q, const RadarConfig& radar);
double dg_el(Angle el, Angle psi_q, const RadarConfig& radar);

AttenuationSet solve_attenuations(const TargetAngle& target, const ReducedLayout& layout, const RadarConfig& radar);

// Coherent superposition on a square layout, unit common phase.
cdouble superimposed_value(Angle az, Angle el, const AttenuationSet& attens, const ReducedLayout& layout,
                           const RadarConfig& radar);

// Maximizer of |superimposed_value|: coarse grid, then per-axis bracketed refinement.
TargetAngle predict_peak(const AttenuationSet& attens, const ReducedLayout& layout, const RadarConfig& radar,
                         const PeakSearch& search = {});

// Superposition for an arbitrary layout with complex per-channel weights.
cdouble layout_superposition(Angle az, Angle el, const std::array<cdouble, kNumChannels>& weights,
                             const FrontEndLayout& layout, const RadarConfig& radar);

TargetAngle predict_peak_layout(const std::array<cdouble, kNumChannels>& weights, const FrontEndLayout& layout,
                                const RadarConfig& radar, const PeakSearch& search = {});

// Largest wrapped pairwise phase difference, radians in [0, pi].
double coherency_check(const std::array<double, kNumChannels>& phases);

// Centered channel phase of the direct sum: common delay terms, array-centroid term, hardware offset.
double direct_channel_phase(std::size_t q, const ScenarioConfig& s);

// wrap(direct_channel_phase - closed_form_phase).
double closed_form_phase_discrepancy(std::size_t q, const ScenarioConfig& s);

std::array<double, kNumChannels> direct_channel_phases(const ScenarioConfig& s);

// Copy of `s` whose hardware phase offsets make all direct channel phases equal.
ScenarioConfig with_coherent_phases(const ScenarioConfig& s);

}  // namespace aoasim
