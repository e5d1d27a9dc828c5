#include "mlexist/error.hpp"

namespace mlexist {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::MissingConstants: return "MissingConstants";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::MixedSizes: return "MixedSizes";
    case ErrorCode::CalledOnUniquenessSet: return "CalledOnUniquenessSet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

}  // namespace mlexist
