#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlexist {

enum class ErrorCode {
  // input validation
  DuplicateLabel,
  NonPositiveWeight,
  EmptySpace,
  LengthMismatch,
  IndexOutOfRange,
  EmptySample,
  UnknownLabel,
  DimensionMismatch,
  EmptySubset,
  NonFiniteInput,
  MissingConstants,
  InvalidOrder,
  SpaceTooLarge,
  MixedSizes,
  CalledOnUniquenessSet,
  InvalidArgument,
  // numerical failures
  NumericalBreakdown,
  SolverDivergence,
  BudgetExceeded,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for the numerical failure codes (LP breakdown, Newton divergence,
/// simulation budget); false for input validation problems.
constexpr bool is_numerical(ErrorCode code) noexcept {
  return code == ErrorCode::NumericalBreakdown ||
         code == ErrorCode::SolverDivergence ||
         code == ErrorCode::BudgetExceeded;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlexist
