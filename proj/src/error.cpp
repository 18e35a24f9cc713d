#include "boxl0/error.hpp"

namespace boxl0 {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonpositiveBound: return "NonpositiveBound";
    case ErrorCode::NonpositiveLambda: return "NonpositiveLambda";
    case ErrorCode::ThresholdTooLarge: return "ThresholdTooLarge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::SideNotPowerOfTwo: return "SideNotPowerOfTwo";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace boxl0
