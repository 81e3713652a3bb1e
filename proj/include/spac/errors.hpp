#pragma once

#include <stdexcept>
#include <string>

namespace spac {

enum class ErrorCode {
  ZeroVarianceColumn,
  AllZeroResponse,
  NonFiniteInput,
  ParseError,
  MissingColumn,
  DimensionError,
  SingularDesign,
  NoConvergence,
  NonFiniteIterate,
  NotPositiveDefinite,
  DegenerateResidual,
  DegenerateDenominator,
  NegativeEntry,
  NoConvergedFit,
  UnknownSetting,
  DegenerateTruth,
  InvalidArgument,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ZeroVarianceColumn: return "ZeroVarianceColumn";
    case ErrorCode::AllZeroResponse: return "AllZeroResponse";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegenerateResidual: return "DegenerateResidual";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NoConvergedFit: return "NoConvergedFit";
    case ErrorCode::UnknownSetting: return "UnknownSetting";
    case ErrorCode::DegenerateTruth: return "DegenerateTruth";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// Library-wide exception: carries a stable code (what went wrong) plus a
// human message (where / with which values).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* code_name() const noexcept { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace spac
