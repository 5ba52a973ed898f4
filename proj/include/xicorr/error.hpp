#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xicorr {

enum class ErrorCode {
  TiesPresent,
  InvalidSample,
  InvalidPermutation,
  SizeMismatch,
  EnumerationTooLarge,
  NotSymmetric,
  EigenFailure,
  RangeExceeded,
  CalibrationTooSmall,
  NotDistributionFree,
  DegenerateColumn,
  NotPSD,
  OddDimension,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying one of the library's error kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xicorr
