#include "mlexist/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlexist/error.hpp"

namespace mlexist::lp {

namespace {

void check_row(const Eigen::RowVectorXd& row, Eigen::Index variables) {
  if (row.size() != variables) {
    throw Error(ErrorCode::DimensionMismatch,
                "constraint row of length " + std::to_string(row.size()) +
                    " for " + std::to_string(variables) + " variables");
  }
  if (!row.allFinite()) throw Error(ErrorCode::NonFiniteInput, "constraint row");
}

double row_scale(const Eigen::RowVectorXd& row) {
  const double m = row.size() ? row.cwiseAbs().maxCoeff() : 0.0;
  return m > 0.0 ? m : 1.0;
}

// Dense phase-I tableau. Columns: u (d) | v (d) | slack (g) | artificial (e),
// with a = u - v. The last row holds reduced costs of sum(artificial), the
// last column the right-hand side.
class Tableau {
 public:
  Tableau(const Problem& p, const Options& opt) : opt_(opt) {
    d_ = p.variables;
    std::vector<Eigen::RowVectorXd> eq_rows;
    std::vector<double> eq_rhs;
    for (const auto& e : p.equalities) {
      const double s = row_scale(e.row);
      eq_rows.push_back(e.row / s);
      eq_rhs.push_back(e.rhs / s);
    }
    if (p.normalization) {
      const double s = row_scale(*p.normalization);
      eq_rows.push_back(*p.normalization / s);
      eq_rhs.push_back(1.0 / s);
    }
    std::vector<Eigen::RowVectorXd> ge_rows;
    for (const auto& r : p.nonnegative) {
      if (r.cwiseAbs().maxCoeff() == 0.0) continue;
      ge_rows.push_back(r / row_scale(r));
    }
    e_ = static_cast<Eigen::Index>(eq_rows.size());
    g_ = static_cast<Eigen::Index>(ge_rows.size());
    m_ = e_ + g_;
    n_ = 2 * d_ + g_ + e_;
    t_ = Eigen::MatrixXd::Zero(m_ + 1, n_ + 1);
    basis_.resize(static_cast<std::size_t>(m_));

    for (Eigen::Index i = 0; i < e_; ++i) {
      const double sign = eq_rhs[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
      const auto& row = eq_rows[static_cast<std::size_t>(i)];
      t_.block(i, 0, 1, d_) = sign * row;
      t_.block(i, d_, 1, d_) = -sign * row;
      t_(i, artificial(i)) = 1.0;
      t_(i, n_) = sign * eq_rhs[static_cast<std::size_t>(i)];
      basis_[static_cast<std::size_t>(i)] = artificial(i);
    }
    // row . a - s = 0, written as -row . a + s = 0 so the slack starts basic.
    for (Eigen::Index j = 0; j < g_; ++j) {
      const Eigen::Index i = e_ + j;
      const auto& row = ge_rows[static_cast<std::size_t>(j)];
      t_.block(i, 0, 1, d_) = -row;
      t_.block(i, d_, 1, d_) = row;
      t_(i, 2 * d_ + j) = 1.0;
      basis_[static_cast<std::size_t>(i)] = 2 * d_ + j;
    }
    for (Eigen::Index i = 0; i < e_; ++i) t_.row(m_) -= t_.row(i);
    for (Eigen::Index i = 0; i < e_; ++i) t_(m_, artificial(i)) = 0.0;
  }

  // Returns the number of pivots performed.
  std::size_t run(std::size_t budget) {
    std::size_t pivots = 0;
    constexpr double kReducedCostTolerance = 1e-10;
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < first_artificial(); ++j) {
        if (t_(m_, j) < -kReducedCostTolerance) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return pivots;

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      double largest_entry = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        largest_entry = std::max(largest_entry, a);
        if (a <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, t_(i, n_)) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave >= 0 &&
             basis_[static_cast<std::size_t>(i)] <
                 basis_[static_cast<std::size_t>(leave)])) {
          if (ratio < best_ratio) best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) {
        // Phase I is bounded below, so a missing pivot is a precision failure.
        throw Error(ErrorCode::NumericalBreakdown,
                    "no admissible pivot (largest column entry " +
                        std::to_string(largest_entry) + ")");
      }
      if (++pivots > budget) {
        throw Error(ErrorCode::NumericalBreakdown,
                    "pivot budget of " + std::to_string(budget) + " exhausted");
      }
      pivot(leave, enter);
    }
  }

  double infeasibility() const { return -t_(m_, n_); }

  Eigen::VectorXd witness() const {
    Eigen::VectorXd values = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      values(basis_[static_cast<std::size_t>(i)]) = std::max(0.0, t_(i, n_));
    }
    return values.head(d_) - values.segment(d_, d_);
  }

 private:
  Eigen::Index artificial(Eigen::Index i) const { return 2 * d_ + g_ + i; }
  Eigen::Index first_artificial() const { return 2 * d_ + g_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const double p = t_(r, c);
    if (std::abs(p) < opt_.breakdown_pivot) {
      throw Error(ErrorCode::NumericalBreakdown, "pivot below breakdown threshold");
    }
    t_.row(r) /= p;
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, c) = 1.0;
    basis_[static_cast<std::size_t>(r)] = c;
  }

  const Options& opt_;
  Eigen::Index d_ = 0, e_ = 0, g_ = 0, m_ = 0, n_ = 0;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

double max_violation(const Problem& problem, const Eigen::VectorXd& a) {
  double worst = 0.0;
  for (const auto& e : problem.equalities) {
    worst = std::max(worst, std::abs(e.row.dot(a) - e.rhs));
  }
  for (const auto& r : problem.nonnegative) {
    worst = std::max(worst, -r.dot(a));
  }
  if (problem.normalization) {
    worst = std::max(worst, std::abs(problem.normalization->dot(a) - 1.0));
  }
  return worst;
}

Outcome solve_feasibility(const Problem& problem, const Options& options) {
  if (problem.variables <= 0) {
    throw Error(ErrorCode::DimensionMismatch, "LP needs at least one variable");
  }
  for (const auto& e : problem.equalities) {
    check_row(e.row, problem.variables);
    if (!std::isfinite(e.rhs)) throw Error(ErrorCode::NonFiniteInput, "rhs");
  }
  for (const auto& r : problem.nonnegative) check_row(r, problem.variables);
  if (problem.normalization) check_row(*problem.normalization, problem.variables);

  Tableau tableau(problem, options);
  const std::size_t budget =
      options.budget_factor *
      (static_cast<std::size_t>(problem.variables) + problem.constraint_count());
  Outcome out;
  out.pivots = tableau.run(budget);
  if (tableau.infeasibility() > options.feasibility_tolerance) {
    out.status = Status::Infeasible;
    return out;
  }
  Eigen::VectorXd a = tableau.witness();
  const double violation = max_violation(problem, a);
  if (violation > options.feasibility_tolerance) {
    throw Error(ErrorCode::NumericalBreakdown,
                "witness violates constraints by " + std::to_string(violation));
  }
  out.status = Status::Feasible;
  out.witness = std::move(a);
  return out;
}

}  // namespace mlexist::lp
