#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsr {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  StrideDoesNotDivide,
  NonHermitianSpectrum,
  KernelTooLarge,
  AllFrequenciesZeroed,
  DegenerateModel,
  NumericalBreakdown,
  InsufficientSamples,
  IoError,
  UnsupportedFormat,
  CorruptHeader,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The code drives the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace gsr
