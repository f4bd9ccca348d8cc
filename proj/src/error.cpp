// SPDX-License-Identifier: Apache-2.0
#include <aoasim/angle.hpp>
#include <aoasim/error.hpp>

#include <cmath>

namespace aoasim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::degenerate_layout: return "degenerate-layout";
    case ErrorCode::domain: return "domain";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::unsupported_range: return "unsupported-range";
    case ErrorCode::no_detection: return "no-detection";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::constraint: return "constraint";
    case ErrorCode::unsolvable: return "unsolvable";
    case ErrorCode::flat_spectrum: return "flat-spectrum";
    case ErrorCode::incomplete_calibration: return "incomplete-calibration";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

}  // namespace aoasim
