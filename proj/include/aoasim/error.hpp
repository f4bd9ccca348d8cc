// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace aoasim {

enum class ErrorCode {
  invalid_config,
  degenerate_layout,
  domain,
  index_out_of_range,
  unsupported_range,
  no_detection,
  dimension_mismatch,
  constraint,
  unsolvable,
  flat_spectrum,
  incomplete_calibration,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aoasim
