#include "ampforge/error.hpp"

namespace ampforge {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NotDensityMatrix: return "NotDensityMatrix";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::UndecomposedBlock: return "UndecomposedBlock";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::AllZeroInput: return "AllZeroInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ampforge
