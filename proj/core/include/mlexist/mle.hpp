#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mlexist/expfam.hpp"
#include "mlexist/linspan.hpp"
#include "mlexist/statespace.hpp"
#include "mlexist/uniqueness.hpp"

namespace mlexist {

struct MleOptions {
  double tolerance = 1e-8;  // on the sup-norm moment residual
  int max_iterations = 500;
  double armijo = 1e-4;
  int max_halvings = 60;
  /// Starting point as coefficients on the input span's basis; default 0.
  /// In the reduced case it is restricted to the closure.
  std::optional<CoefVector> initial;
  UniquenessOptions uniqueness;
};

enum class MleKind { Exists, Reduced };

/// Family restricted to the closure X~ of the sample support. Weights are
/// restricted without renormalization.
struct ReducedFamily {
  IndexSet states;  // X~, as indices into the original space
  StateSpace space;
  LinearSpan span;  // kept_generators() index rows of the original basis
  Sample sample;    // reindexed into X~
  UniquenessReport report;
};

ReducedFamily reduced_family(const StateSpace& space, const LinearSpan& span,
                             const Sample& sample,
                             const UniquenessOptions& options = {});

struct MleResult {
  MleKind kind = MleKind::Exists;
  /// States carrying the fitted density: all of X, or the closure X~.
  IndexSet support;
  /// Density over `support` (position i refers to support.items()[i]).
  DensityTable density;
  /// Coefficients of log p in the working span (the original span for
  /// Exists, the restricted span for Reduced).
  CoefVector coefficients;
  /// Coefficients on the original basis whose restriction to the support is
  /// log p, chosen to stay at or below max log p off the support. For Exists
  /// this equals `coefficients`.
  CoefVector full_coefficients;
  /// Sup of the log-likelihood over the original family.
  double log_likelihood_sup = 0.0;
  int iterations = 0;
  double moment_residual = 0.0;
  /// Increase of the log-likelihood at each accepted Newton step.
  std::vector<double> step_gains;
  /// For Reduced: nonnegative direction delta, zero exactly on the support.
  std::optional<CoefVector> witness_delta;

  /// Density over the original X, zero off the support.
  StateVector extended_density(std::size_t state_count) const;
};

/// Maximum likelihood within e(B). When the sample support is not a set of
/// uniqueness for B_+, fits the extended MLE on the closure instead.
MleResult fit(const StateSpace& space, const LinearSpan& span, const Sample& sample,
              const MleOptions& options = {});

/// Existence of the MLE: the support is a set of uniqueness for B_+.
bool check_exists(const StateSpace& space, const LinearSpan& span,
                  const Sample& sample, const UniquenessOptions& options = {});

}  // namespace mlexist
