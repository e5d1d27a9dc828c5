#include "mlexist/linspan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlexist/error.hpp"

namespace mlexist {

namespace {

struct Reduction {
  Eigen::MatrixXd rows;
  std::vector<Eigen::Index> kept;
};

Reduction reduce_rows(const Eigen::MatrixXd& generators) {
  if (!generators.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, "basis contains non-finite entries");
  }
  const double scale = generators.size() ? generators.cwiseAbs().maxCoeff() : 0.0;
  const double threshold = LinearSpan::kPivotThreshold * scale;

  // Echelon copies of the kept rows with their pivot columns.
  std::vector<Eigen::RowVectorXd> echelon;
  std::vector<Eigen::Index> pivots;
  Reduction out;
  for (Eigen::Index r = 0; r < generators.rows(); ++r) {
    Eigen::RowVectorXd row = generators.row(r);
    for (std::size_t j = 0; j < echelon.size(); ++j) {
      const double factor = row(pivots[j]) / echelon[j](pivots[j]);
      if (factor != 0.0) row -= factor * echelon[j];
    }
    Eigen::Index pivot = 0;
    const double magnitude = row.size() ? row.cwiseAbs().maxCoeff(&pivot) : 0.0;
    if (magnitude > threshold && scale > 0.0) {
      echelon.push_back(std::move(row));
      pivots.push_back(pivot);
      out.kept.push_back(r);
    }
  }
  out.rows.resize(static_cast<Eigen::Index>(out.kept.size()), generators.cols());
  for (std::size_t j = 0; j < out.kept.size(); ++j) {
    out.rows.row(static_cast<Eigen::Index>(j)) = generators.row(out.kept[j]);
  }
  return out;
}

}  // namespace

LinearSpan::LinearSpan(const Eigen::MatrixXd& generators) {
  if (generators.cols() == 0) {
    throw Error(ErrorCode::EmptySpace, "basis rows have no entries");
  }
  Reduction reduced = reduce_rows(generators);
  basis_ = std::move(reduced.rows);
  kept_ = std::move(reduced.kept);
  if (basis_.rows() == 0) throw Error(ErrorCode::EmptySpace, "all basis rows vanish");

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(basis_.cols());
  CoefVector c = basis_.transpose().colPivHouseholderQr().solve(ones);
  const double residual = (basis_.transpose() * c - ones).cwiseAbs().maxCoeff();
  if (residual <= kConstantsTolerance) unit_ = std::move(c);
}

LinearSpan LinearSpan::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptySpace, "no basis rows given");
  const std::size_t width = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw Error(ErrorCode::DimensionMismatch,
                  "basis row " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " entries, expected " +
                      std::to_string(width));
    }
    for (std::size_t j = 0; j < width; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return LinearSpan(m);
}

LinearSpan LinearSpan::restricted(const IndexSet& states) const {
  if (states.empty()) throw Error(ErrorCode::EmptySubset, "restriction to no states");
  Eigen::MatrixXd cols(basis_.rows(), static_cast<Eigen::Index>(states.size()));
  Eigen::Index c = 0;
  for (std::size_t x : states) {
    if (static_cast<Eigen::Index>(x) >= basis_.cols()) {
      throw Error(ErrorCode::IndexOutOfRange, std::to_string(x));
    }
    cols.col(c++) = basis_.col(static_cast<Eigen::Index>(x));
  }
  return LinearSpan(cols);
}

StateVector evaluate(const LinearSpan& span, const CoefVector& a) {
  if (a.size() != span.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "coefficient vector of length " + std::to_string(a.size()) +
                    " for span of dimension " + std::to_string(span.dim()));
  }
  return span.basis().transpose() * a;
}

double oscillation(const StateVector& phi, const IndexSet& subset) {
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "oscillation over empty U");
  double min_u = phi(static_cast<Eigen::Index>(subset.front()));
  for (std::size_t x : subset) {
    if (static_cast<Eigen::Index>(x) >= phi.size()) {
      throw Error(ErrorCode::IndexOutOfRange, std::to_string(x));
    }
    min_u = std::min(min_u, phi(static_cast<Eigen::Index>(x)));
  }
  return std::max(0.0, phi.maxCoeff() - min_u);
}

double oscillation(const LinearSpan& span, const CoefVector& a,
                   const IndexSet& subset) {
  return oscillation(evaluate(span, a), subset);
}

bool contains_constants(const LinearSpan& span) {
  return span.unit_coefficients().has_value();
}

void require_constants(const LinearSpan& span) {
  if (!contains_constants(span)) {
    throw Error(ErrorCode::MissingConstants,
                "the constant function is not in the span");
  }
}

CoefVector coefficients_of(const LinearSpan& span, const StateVector& values) {
  if (values.size() != span.state_count()) {
    throw Error(ErrorCode::DimensionMismatch, "function length differs from K");
  }
  return span.basis().transpose().colPivHouseholderQr().solve(values);
}

}  // namespace mlexist
