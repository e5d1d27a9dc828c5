#pragma once

#include <Eigen/Dense>

#include "mlexist/linspan.hpp"
#include "mlexist/statespace.hpp"

namespace mlexist {

/// Exponential density p = e^{phi - psi(phi)} with respect to the weights.
struct DensityTable {
  StateVector values;      // p(x) > 0
  StateVector log_values;  // phi(x) - psi(phi)
};

/// psi(phi) = log sum_x e^{phi(x)} mu(x), via log-sum-exp.
double log_partition(const StateSpace& space, const StateVector& phi);

DensityTable density(const StateSpace& space, const StateVector& phi);
DensityTable density(const StateSpace& space, const LinearSpan& span,
                     const CoefVector& a);

/// l = sum_i log p(x_i) = n (mean_i phi(x_i) - psi(phi)).
double log_likelihood(const StateSpace& space, const StateVector& phi,
                      const Sample& sample);
double log_likelihood(const StateSpace& space, const LinearSpan& span,
                      const CoefVector& a, const Sample& sample);

/// First and second moments of the basis functions under P(X=x) = p(x)mu(x).
struct Moments {
  Eigen::VectorXd mean;        // E b_j
  Eigen::MatrixXd covariance;  // E b_j b_l - E b_j E b_l
};

Moments moments(const StateSpace& space, const LinearSpan& span,
                const CoefVector& a);
/// Moments of the rows of `functions` (r x K) under the density p.
Moments moments(const StateSpace& space, const Eigen::MatrixXd& functions,
                const DensityTable& p);

/// Sample average of each basis function, (1/n) sum_i b_j(x_i).
Eigen::VectorXd sample_means(const Eigen::MatrixXd& functions, const Sample& sample);

}  // namespace mlexist
