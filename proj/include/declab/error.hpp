#ifndef DECLAB_ERROR_HPP
#define DECLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace declab {

enum class ErrorCode {
  NotHermitian,
  ConvergenceFailure,
  DimensionMismatch,
  DimensionTooLarge,
  NonFinite,
  OutsideBall,
  NotAState,
  NotUnitary,
  BadWeights,
  NotIdempotent,
  NotOrthogonal,
  NotComplete,
  InsufficientData,
  NonDecaying,
  QuadratureFailure,
  NotDiscrete,
  InvalidModel,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::OutsideBall: return "OutsideBall";
    case ErrorCode::NotAState: return "NotAState";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::NotIdempotent: return "NotIdempotent";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NotComplete: return "NotComplete";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonDecaying: return "NonDecaying";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NotDiscrete: return "NotDiscrete";
    case ErrorCode::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace declab

#endif  // DECLAB_ERROR_HPP
