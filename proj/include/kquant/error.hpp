#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kquant {

enum class ErrorCode {
  NonConvexInput,
  GridMismatch,
  NonFinite,
  NewtonDiverged,
  InadmissibleInput,
  LegendreFailure,
  SlopeUnstable,
  PreconditionViolated,
  EmptyData,
  ZeroVolume,
  NonConvex,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the library's error kinds.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvexInput: return "NonConvexInput";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::InadmissibleInput: return "InadmissibleInput";
    case ErrorCode::LegendreFailure: return "LegendreFailure";
    case ErrorCode::SlopeUnstable: return "SlopeUnstable";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::ZeroVolume: return "ZeroVolume";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace kquant
