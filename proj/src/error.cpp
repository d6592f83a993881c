#include "gsr/error.hpp"

namespace gsr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::StrideDoesNotDivide: return "StrideDoesNotDivide";
    case ErrorCode::NonHermitianSpectrum: return "NonHermitianSpectrum";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::AllFrequenciesZeroed: return "AllFrequenciesZeroed";
    case ErrorCode::DegenerateModel: return "DegenerateModel";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace gsr
