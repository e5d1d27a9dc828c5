#include "mlexist/expfam.hpp"

#include <cmath>
#include <string>

#include "mlexist/error.hpp"

namespace mlexist {

namespace {

void check_phi(const StateSpace& space, const StateVector& phi) {
  if (static_cast<std::size_t>(phi.size()) != space.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "function of length " + std::to_string(phi.size()) +
                    " on a space of " + std::to_string(space.size()) + " states");
  }
  if (!phi.allFinite()) throw Error(ErrorCode::NonFiniteInput, "phi");
}

void check_span(const StateSpace& space, const LinearSpan& span) {
  if (static_cast<std::size_t>(span.state_count()) != space.size()) {
    throw Error(ErrorCode::DimensionMismatch, "span and space disagree on K");
  }
}

}  // namespace

double log_partition(const StateSpace& space, const StateVector& phi) {
  check_phi(space, phi);
  const auto w = space.weights();
  // Shift by the largest exponent phi(x) + log mu(x).
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index x = 0; x < phi.size(); ++x) {
    top = std::max(top, phi(x) + std::log(w[static_cast<std::size_t>(x)]));
  }
  double sum = 0.0;
  for (Eigen::Index x = 0; x < phi.size(); ++x) {
    sum += std::exp(phi(x) + std::log(w[static_cast<std::size_t>(x)]) - top);
  }
  return top + std::log(sum);
}

DensityTable density(const StateSpace& space, const StateVector& phi) {
  const double psi = log_partition(space, phi);
  DensityTable out;
  out.log_values = phi.array() - psi;
  out.values = out.log_values.array().exp();
  return out;
}

DensityTable density(const StateSpace& space, const LinearSpan& span,
                     const CoefVector& a) {
  check_span(space, span);
  return density(space, evaluate(span, a));
}

double log_likelihood(const StateSpace& space, const StateVector& phi,
                      const Sample& sample) {
  check_phi(space, phi);
  if (sample.state_count() != space.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sample drawn from another space");
  }
  double total = 0.0;
  for (std::size_t x : sample.indices()) total += phi(static_cast<Eigen::Index>(x));
  const double n = static_cast<double>(sample.size());
  return total - n * log_partition(space, phi);
}

double log_likelihood(const StateSpace& space, const LinearSpan& span,
                      const CoefVector& a, const Sample& sample) {
  check_span(space, span);
  return log_likelihood(space, evaluate(span, a), sample);
}

Moments moments(const StateSpace& space, const Eigen::MatrixXd& functions,
                const DensityTable& p) {
  const Eigen::Index k = functions.cols();
  if (static_cast<std::size_t>(k) != space.size() || p.values.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "moments: inconsistent K");
  }
  Eigen::VectorXd mass(k);
  for (Eigen::Index x = 0; x < k; ++x) {
    mass(x) = p.values(x) * space.weight(static_cast<std::size_t>(x));
  }
  Moments m;
  m.mean = functions * mass;
  const Eigen::MatrixXd centered = functions.colwise() - m.mean;
  m.covariance = centered * mass.asDiagonal() * centered.transpose();
  return m;
}

Moments moments(const StateSpace& space, const LinearSpan& span,
                const CoefVector& a) {
  return moments(space, span.basis(), density(space, span, a));
}

Eigen::VectorXd sample_means(const Eigen::MatrixXd& functions, const Sample& sample) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(functions.rows());
  for (std::size_t x : sample.indices()) sum += functions.col(static_cast<Eigen::Index>(x));
  return sum / static_cast<double>(sample.size());
}

}  // namespace mlexist
