#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stagpoint {

enum class ErrorCode {
  DerivativeUnavailable,
  BcViolation,
  NonpositiveMax,
  TooManyMaximizers,
  FlatMaximum,
  SingularEta,
  QuadratureBudgetExceeded,
  DomainError,
  BeyondBlowup,
  UnanchoredFlow,
  InternalInconsistency,
  InsufficientAsymptoticDepth,
  ApproachingSingularity,
  InvalidInput,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by validate(); carries the endpoint residuals that failed.
class BcViolation : public Error {
 public:
  BcViolation(const std::string& what, double value_residual, double slope_residual)
      : Error(ErrorCode::BcViolation, what),
        value_residual(value_residual),
        slope_residual(slope_residual) {}

  double value_residual;
  double slope_residual;
};

/// Raised when adaptive quadrature cannot meet its tolerance; the best
/// estimate found so far is kept.
class QuadratureBudgetExceeded : public Error {
 public:
  QuadratureBudgetExceeded(const std::string& what, double best_estimate, double error_estimate)
      : Error(ErrorCode::QuadratureBudgetExceeded, what),
        best_estimate(best_estimate),
        error_estimate(error_estimate) {}

  double best_estimate;
  double error_estimate;
};

}  // namespace stagpoint
