#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mlexist/statespace.hpp"

namespace mlexist {

/// Coefficients a of phi = sum_j a_j b_j in a span's stored basis.
using CoefVector = Eigen::VectorXd;
/// A function on the state space, tabulated by state index.
using StateVector = Eigen::VectorXd;

/// Linear space B of functions on X, stored as a d x K matrix whose rows are
/// linearly independent basis functions b_j.
///
/// Construction accepts redundant generators: rows are scanned in order and
/// kept only if they are independent of the rows kept so far (forward
/// elimination, pivot threshold 1e-10 relative to the largest |entry|).
class LinearSpan {
 public:
  static constexpr double kPivotThreshold = 1e-10;
  static constexpr double kConstantsTolerance = 1e-9;

  explicit LinearSpan(const Eigen::MatrixXd& generators);
  static LinearSpan from_rows(const std::vector<std::vector<double>>& rows);

  Eigen::Index dim() const noexcept { return basis_.rows(); }
  Eigen::Index state_count() const noexcept { return basis_.cols(); }
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }

  /// Positions (in the generator matrix) of the rows that were kept.
  const std::vector<Eigen::Index>& kept_generators() const noexcept {
    return kept_;
  }

  /// Coefficients c with sum_j c_j b_j = 1, when 1 lies in the span.
  const std::optional<CoefVector>& unit_coefficients() const noexcept {
    return unit_;
  }

  /// Restriction of every basis function to the given states, re-reduced to
  /// full rank. kept_generators() of the result indexes rows of *this.
  LinearSpan restricted(const IndexSet& states) const;

 private:
  Eigen::MatrixXd basis_;
  std::vector<Eigen::Index> kept_;
  std::optional<CoefVector> unit_;
};

/// phi(x) = sum_j a_j b_j(x) for every state.
StateVector evaluate(const LinearSpan& span, const CoefVector& a);

/// lambda_U(phi) = max_X phi - min_U phi.
double oscillation(const LinearSpan& span, const CoefVector& a,
                   const IndexSet& subset);
double oscillation(const StateVector& phi, const IndexSet& subset);

/// True iff the constant function lies in the span (least-squares residual
/// of fitting 1 is at most 1e-9).
bool contains_constants(const LinearSpan& span);

/// Throws MissingConstants unless 1 is in the span.
void require_constants(const LinearSpan& span);

/// Least-squares coefficients a with evaluate(span, a) ~= values.
CoefVector coefficients_of(const LinearSpan& span, const StateVector& values);

}  // namespace mlexist
