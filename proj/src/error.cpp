#include "xicorr/error.hpp"

namespace xicorr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TiesPresent: return "TiesPresent";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::RangeExceeded: return "RangeExceeded";
    case ErrorCode::CalibrationTooSmall: return "CalibrationTooSmall";
    case ErrorCode::NotDistributionFree: return "NotDistributionFree";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace xicorr
