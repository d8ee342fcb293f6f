#pragma once

#include <stdexcept>
#include <string>

namespace trlse {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  SingularMatrix,
  Precondition,
  Infeasible,
  NotImplemented,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::SingularMatrix: return "singular matrix";
    case ErrorCode::Precondition: return "precondition violated";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::NotImplemented: return "not implemented";
    case ErrorCode::Io: return "i/o failure";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trlse
