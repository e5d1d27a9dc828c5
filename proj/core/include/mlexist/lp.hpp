#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace mlexist::lp {

struct Equality {
  Eigen::RowVectorXd row;
  double rhs = 0.0;
};

/// Feasibility question over free variables a in R^d:
///   row . a  = rhs   for every equality,
///   row . a >= 0     for every entry of `nonnegative`,
///   normalization . a = 1   (when present; selects a nontrivial point of a cone).
struct Problem {
  Eigen::Index variables = 0;
  std::vector<Equality> equalities;
  std::vector<Eigen::RowVectorXd> nonnegative;
  std::optional<Eigen::RowVectorXd> normalization;

  std::size_t constraint_count() const noexcept {
    return equalities.size() + nonnegative.size() + (normalization ? 1 : 0);
  }
};

enum class Status { Feasible, Infeasible };

struct Outcome {
  Status status = Status::Infeasible;
  std::optional<Eigen::VectorXd> witness;
  std::size_t pivots = 0;

  bool feasible() const noexcept { return status == Status::Feasible; }
};

struct Options {
  double feasibility_tolerance = 1e-7;
  double pivot_tolerance = 1e-9;
  double breakdown_pivot = 1e-12;
  /// Pivot budget is budget_factor * (variables + constraints).
  std::size_t budget_factor = 10;
};

/// Phase-I simplex with Bland's rule. Deterministic. Throws
/// Error(NumericalBreakdown) when the pivot budget is exhausted, when no
/// admissible pivot remains while infeasibility is unresolved, or when a
/// claimed witness fails re-validation against the raw constraints.
Outcome solve_feasibility(const Problem& problem, const Options& options = {});

/// Largest violation of the raw constraints by `a` (0 when all hold exactly).
double max_violation(const Problem& problem, const Eigen::VectorXd& a);

}  // namespace mlexist::lp
