#pragma once

#include <cstddef>
#include <map>
#include <optional>

#include "mlexist/linspan.hpp"
#include "mlexist/lp.hpp"
#include "mlexist/statespace.hpp"

namespace mlexist {

struct UniquenessOptions {
  /// Feasibility tolerance of the per-point LPs, including "phi = 0 on U".
  double tolerance = 1e-7;
  /// Worker threads for the per-point LPs; 0 or 1 runs them inline.
  unsigned threads = 1;
};

/// Outcome of testing a subset U against the cone B_+ of nonnegative members.
struct UniquenessReport {
  bool is_uniqueness = false;
  /// Largest set on which every phi in B_+ vanishing on U must vanish.
  IndexSet closure;
  /// Sum of the escape witnesses; nonnegative, zero exactly on the closure.
  std::optional<CoefVector> witness_delta;
  /// For each state x outside the closure: phi_x in B_+ with phi_x = 0 on U
  /// and phi_x(x) = 1.
  std::map<std::size_t, CoefVector> escape_witnesses;
};

/// Builds the LP "phi >= 0 on X, phi = 0 on U, phi(target) = 1" over the
/// span coefficients.
lp::Problem escape_problem(const LinearSpan& span, const IndexSet& subset,
                           std::size_t target);

/// Computes the closure of U and its witnesses. Every state outside U is
/// tested, in index order, with no early exit.
UniquenessReport closure(const LinearSpan& span, const IndexSet& subset,
                         const UniquenessOptions& options = {});

/// True iff the only phi in B_+ vanishing on U is phi = 0.
bool is_set_of_uniqueness(const LinearSpan& span, const IndexSet& subset,
                          const UniquenessOptions& options = {});

/// Checks (U of uniqueness) implies (V of uniqueness) for U within V.
bool monotonicity_check(const LinearSpan& span, const IndexSet& subset,
                        const IndexSet& superset,
                        const UniquenessOptions& options = {});

}  // namespace mlexist
