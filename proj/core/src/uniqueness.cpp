#include "mlexist/uniqueness.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "mlexist/error.hpp"

namespace mlexist {

namespace {

void validate_subset(const LinearSpan& span, const IndexSet& subset) {
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "U must be nonempty");
  if (static_cast<Eigen::Index>(subset.back()) >= span.state_count()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "state " + std::to_string(subset.back()) + " outside X");
  }
}

}  // namespace

lp::Problem escape_problem(const LinearSpan& span, const IndexSet& subset,
                           std::size_t target) {
  const Eigen::MatrixXd& b = span.basis();
  lp::Problem p;
  p.variables = span.dim();
  for (std::size_t u : subset) {
    p.equalities.push_back({b.col(static_cast<Eigen::Index>(u)).transpose(), 0.0});
  }
  for (Eigen::Index x = 0; x < span.state_count(); ++x) {
    if (subset.contains(static_cast<std::size_t>(x))) continue;
    p.nonnegative.push_back(b.col(x).transpose());
  }
  p.normalization = b.col(static_cast<Eigen::Index>(target)).transpose();
  return p;
}

UniquenessReport closure(const LinearSpan& span, const IndexSet& subset,
                         const UniquenessOptions& options) {
  validate_subset(span, subset);
  const std::size_t k = static_cast<std::size_t>(span.state_count());
  const IndexSet outside = subset.complement(k);
  const auto& candidates = outside.items();

  lp::Options lp_options;
  lp_options.feasibility_tolerance = options.tolerance;

  std::vector<std::optional<CoefVector>> witnesses(candidates.size());
  auto solve_range = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < candidates.size(); i += stride) {
      lp::Outcome o =
          lp::solve_feasibility(escape_problem(span, subset, candidates[i]), lp_options);
      if (o.feasible()) witnesses[i] = std::move(o.witness);
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads,
                                      static_cast<unsigned>(candidates.size())));
  if (threads <= 1) {
    solve_range(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          solve_range(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  UniquenessReport report;
  std::vector<std::size_t> closed(subset.begin(), subset.end());
  CoefVector delta = CoefVector::Zero(span.dim());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (witnesses[i]) {
      delta += *witnesses[i];
      report.escape_witnesses.emplace(candidates[i], std::move(*witnesses[i]));
    } else {
      closed.push_back(candidates[i]);
    }
  }
  report.closure = IndexSet::from_unsorted(std::move(closed));
  report.is_uniqueness = report.closure.size() == k;
  if (!report.is_uniqueness) {
    // Each escaping state contributes at least 1 before summation.
    const StateVector values = evaluate(span, delta);
    for (std::size_t x : report.closure.complement(k)) {
      if (!(values(static_cast<Eigen::Index>(x)) >= 0.5)) {
        throw Error(ErrorCode::NumericalBreakdown,
                    "witness sum is below 0.5 at state " + std::to_string(x));
      }
    }
    report.witness_delta = std::move(delta);
  }
  return report;
}

bool is_set_of_uniqueness(const LinearSpan& span, const IndexSet& subset,
                          const UniquenessOptions& options) {
  return closure(span, subset, options).is_uniqueness;
}

bool monotonicity_check(const LinearSpan& span, const IndexSet& subset,
                        const IndexSet& superset,
                        const UniquenessOptions& options) {
  if (!superset.includes(subset)) {
    throw Error(ErrorCode::InvalidArgument, "U must be contained in V");
  }
  if (!is_set_of_uniqueness(span, subset, options)) return true;
  return is_set_of_uniqueness(span, superset, options);
}

}  // namespace mlexist
