#pragma once

#include <stdexcept>
#include <string>

namespace ampforge {

enum class ErrorCode {
  ShapeMismatch,
  NumericalFailure,
  NotHermitian,
  TooLarge,
  WindowOutOfRange,
  NotUnitary,
  SizeMismatch,
  NotDensityMatrix,
  DidNotConverge,
  UndecomposedBlock,
  IndexOutOfRange,
  DimensionMismatch,
  EmptyBatch,
  AllZeroInput,
  ParseError,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures to exit statuses without
/// string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ampforge
