#ifndef QDM_ERROR_HPP
#define QDM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdm {

enum class ErrorKind {
  NotHermitian,
  NotPositive,
  TraceNotOne,
  DimensionMismatch,
  BadSubsystemIndex,
  NotUnitary,
  CompletionFailure,
  InvalidPMF,
  DegenerateUndecided,
  StateResultMismatch,
  NotPure,
  InvalidParams,
  ParseError,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BadSubsystemIndex: return "BadSubsystemIndex";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::CompletionFailure: return "CompletionFailure";
    case ErrorKind::InvalidPMF: return "InvalidPMF";
    case ErrorKind::DegenerateUndecided: return "DegenerateUndecided";
    case ErrorKind::StateResultMismatch: return "StateResultMismatch";
    case ErrorKind::NotPure: return "NotPure";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Error carrying the violated invariant and, where meaningful, the measured residual.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail, double residual = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), residual_(residual) {}

  ErrorKind kind() const noexcept { return kind_; }
  double residual() const noexcept { return residual_; }

 private:
  ErrorKind kind_;
  double residual_;
};

}  // namespace qdm

#endif  // QDM_ERROR_HPP
