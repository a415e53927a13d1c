#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgcgen {

enum class ErrorCode {
  parse,
  validation,
  empty_graph,
  inconsistent,
  convergence,
  io,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "E_PARSE";
    case ErrorCode::validation: return "E_VALIDATION";
    case ErrorCode::empty_graph: return "E_EMPTY_GRAPH";
    case ErrorCode::inconsistent: return "E_INCONSISTENT";
    case ErrorCode::convergence: return "E_CONVERGENCE";
    case ErrorCode::io: return "E_IO";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Thrown by iterative eigensolvers when the matvec budget runs out; carries
/// the residual norms reached so far.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& message, std::vector<double> residuals)
      : Error(ErrorCode::convergence, message), residuals_(std::move(residuals)) {}

  const std::vector<double>& achieved_residuals() const noexcept { return residuals_; }

private:
  std::vector<double> residuals_;
};

}  // namespace sgcgen
