#pragma once

#include <stdexcept>
#include <string>

namespace spca {

enum class ErrorCode {
  InvalidInput,
  ModelInvalid,
  Unsupported,
  SolverFailed,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when the SDP iteration breaks down or a decoder requires a converged
// solve; carries the residuals at the point of failure.
class SolverFailed : public Error {
 public:
  SolverFailed(const std::string& what, double primal_residual,
               double dual_residual, int iterations)
      : Error(ErrorCode::SolverFailed, what),
        primal_residual(primal_residual),
        dual_residual(dual_residual),
        iterations(iterations) {}

  double primal_residual;
  double dual_residual;
  int iterations;
};

}  // namespace spca
