#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsgrn {

enum class ErrorCode {
  SyntaxError,
  RepressingSelfEdge,
  DuplicateEdge,
  DanglingNode,
  LogicSourceMismatch,
  UnknownIdentifier,
  ArityMismatch,
  ThresholdInconsistent,
  BackendBudgetExhausted,
  UnsupportedSignature,
  IndexOutOfRange,
  UnknownFactorVertex,
  NotRegular,
  NonFiniteState,
  MalformedQuery,
  IoError,
  FormatVersionMismatch,
  ChecksumMismatch,
  InvalidArgument,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::RepressingSelfEdge: return "RepressingSelfEdge";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DanglingNode: return "DanglingNode";
    case ErrorCode::LogicSourceMismatch: return "LogicSourceMismatch";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::ThresholdInconsistent: return "ThresholdInconsistent";
    case ErrorCode::BackendBudgetExhausted: return "BackendBudgetExhausted";
    case ErrorCode::UnsupportedSignature: return "UnsupportedSignature";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnknownFactorVertex: return "UnknownFactorVertex";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::MalformedQuery: return "MalformedQuery";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dsgrn
