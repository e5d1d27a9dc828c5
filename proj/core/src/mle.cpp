#include "mlexist/mle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>

#include "mlexist/error.hpp"

namespace mlexist {

namespace {

void check_inputs(const StateSpace& space, const LinearSpan& span,
                  const Sample& sample) {
  if (static_cast<std::size_t>(span.state_count()) != space.size()) {
    throw Error(ErrorCode::DimensionMismatch, "span and space disagree on K");
  }
  if (sample.state_count() != space.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sample drawn from another space");
  }
  require_constants(span);
}

// Rows of `basis` centered to zero plain mean and re-reduced to full rank.
// They span B modulo constants, which removes the shift invariance.
Eigen::MatrixXd working_basis(const Eigen::MatrixXd& basis) {
  Eigen::MatrixXd centered = basis.colwise() - basis.rowwise().mean();
  const double scale = basis.cwiseAbs().maxCoeff();
  if (centered.cwiseAbs().maxCoeff() <= LinearSpan::kPivotThreshold * scale) {
    return Eigen::MatrixXd(0, basis.cols());
  }
  return LinearSpan(centered).basis();
}

struct Ascent {
  StateVector phi;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> gains;
};

double moment_residual(const StateSpace& space, const Eigen::MatrixXd& basis,
                       const Eigen::VectorXd& target, const DensityTable& p) {
  return (target - moments(space, basis, p).mean).cwiseAbs().maxCoeff();
}

// Damped Newton ascent of l(theta) = sum_i phi(x_i) - n psi(phi) with
// phi = W^T theta. Gradient n (mean_W - E_p W), Hessian -n Cov_p(W).
Ascent maximize(const StateSpace& space, const LinearSpan& span,
                const Sample& sample, const MleOptions& opt,
                const std::optional<StateVector>& start) {
  const Eigen::MatrixXd& basis = span.basis();
  const Eigen::MatrixXd w = working_basis(basis);
  const Eigen::VectorXd basis_target = sample_means(basis, sample);
  const Eigen::VectorXd target = sample_means(w, sample);
  const double n = static_cast<double>(sample.size());
  const Eigen::Index k = basis.cols();

  Eigen::VectorXd mu(k);
  for (Eigen::Index x = 0; x < k; ++x) mu(x) = space.weight(static_cast<std::size_t>(x));

  Ascent out;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(w.rows());
  if (start && w.rows() > 0) {
    const StateVector centered = start->array() - start->mean();
    theta = w.transpose().colPivHouseholderQr().solve(centered);
  }
  out.phi = w.transpose() * theta;

  for (;;) {
    const DensityTable p = density(space, out.phi);
    out.residual = moment_residual(space, basis, basis_target, p);
    if (out.residual <= opt.tolerance || w.rows() == 0) return out;
    if (out.iterations >= opt.max_iterations) {
      throw Error(ErrorCode::SolverDivergence,
                  "moment residual " + std::to_string(out.residual) + " after " +
                      std::to_string(out.iterations) + " iterations");
    }
    ++out.iterations;

    const Moments m = moments(space, w, p);
    const Eigen::VectorXd grad = target - m.mean;
    const Eigen::VectorXd mass = p.values.cwiseProduct(mu);

    double damping = 0.0;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd h = m.covariance;
      h.diagonal().array() += damping;
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      Eigen::VectorXd step;
      if (llt.info() == Eigen::Success) step = llt.solve(grad);
      const double slope = llt.info() == Eigen::Success ? grad.dot(step) : -1.0;

      if (slope > 0.0 && step.allFinite()) {
        const StateVector direction = w.transpose() * step;
        double t = 1.0;
        for (int halving = 0; halving <= opt.max_halvings; ++halving, t *= 0.5) {
          const StateVector delta = t * direction;
          // l(phi + delta) - l(phi), evaluated relative to the current density
          // so that tiny gains are not lost to cancellation.
          double mean_shift = 0.0;
          for (std::size_t x : sample.indices()) mean_shift += delta(static_cast<Eigen::Index>(x));
          mean_shift /= n;
          double rel = 0.0;
          for (Eigen::Index x = 0; x < k; ++x) rel += mass(x) * std::expm1(delta(x));
          if (!std::isfinite(rel) || rel <= -1.0) continue;
          const double gain = n * (mean_shift - std::log1p(rel));
          if (gain > 0.0 && gain >= opt.armijo * t * n * slope) {
            theta += t * step;
            out.phi = w.transpose() * theta;
            out.gains.push_back(gain);
            accepted = true;
            break;
          }
        }
      }
      if (!accepted) {
        damping = damping == 0.0 ? 1e-8 * std::max(1.0, m.covariance.trace()) : damping * 10.0;
        if (damping > 1e12) {
          throw Error(ErrorCode::SolverDivergence,
                      "no ascent step found at residual " + std::to_string(out.residual));
        }
      }
    }
  }
}

ReducedFamily reduce(const StateSpace& space, const LinearSpan& span,
                     const Sample& sample, UniquenessReport report) {
  std::unordered_map<std::size_t, std::size_t> position;
  std::size_t i = 0;
  for (std::size_t x : report.closure) position.emplace(x, i++);
  std::vector<std::size_t> reindexed;
  reindexed.reserve(sample.size());
  for (std::size_t x : sample.indices()) reindexed.push_back(position.at(x));

  IndexSet states = report.closure;
  StateSpace sub_space = space.restricted(states);
  LinearSpan sub_span = span.restricted(states);
  Sample sub_sample(sub_space, std::move(reindexed));
  return ReducedFamily{std::move(states), std::move(sub_space), std::move(sub_span),
                       std::move(sub_sample), std::move(report)};
}

}  // namespace

StateVector MleResult::extended_density(std::size_t state_count) const {
  StateVector out = StateVector::Zero(static_cast<Eigen::Index>(state_count));
  Eigen::Index i = 0;
  for (std::size_t x : support) out(static_cast<Eigen::Index>(x)) = density.values(i++);
  return out;
}

ReducedFamily reduced_family(const StateSpace& space, const LinearSpan& span,
                             const Sample& sample, const UniquenessOptions& options) {
  check_inputs(space, span, sample);
  UniquenessReport report = closure(span, sample_support(sample), options);
  if (report.is_uniqueness) {
    throw Error(ErrorCode::CalledOnUniquenessSet,
                "the sample support is a set of uniqueness; nothing to reduce");
  }
  return reduce(space, span, sample, std::move(report));
}

MleResult fit(const StateSpace& space, const LinearSpan& span, const Sample& sample,
              const MleOptions& options) {
  check_inputs(space, span, sample);
  MleResult result;

  UniquenessReport report = closure(span, sample_support(sample), options.uniqueness);
  if (report.is_uniqueness) {
    std::optional<StateVector> start;
    if (options.initial) start = evaluate(span, *options.initial);
    Ascent a = maximize(space, span, sample, options, start);
    result.kind = MleKind::Exists;
    result.support = IndexSet::all(space.size());
    result.density = density(space, a.phi);
    result.coefficients = coefficients_of(span, result.density.log_values);
    result.full_coefficients = result.coefficients;
    result.log_likelihood_sup = log_likelihood(space, a.phi, sample);
    result.iterations = a.iterations;
    result.moment_residual = a.residual;
    result.step_gains = std::move(a.gains);
    return result;
  }

  ReducedFamily reduced = reduce(space, span, sample, std::move(report));
  std::optional<StateVector> start;
  if (options.initial) {
    const StateVector phi = evaluate(span, *options.initial);
    StateVector sub(static_cast<Eigen::Index>(reduced.states.size()));
    Eigen::Index i = 0;
    for (std::size_t x : reduced.states) sub(i++) = phi(static_cast<Eigen::Index>(x));
    start = std::move(sub);
  }
  Ascent a = maximize(reduced.space, reduced.span, reduced.sample, options, start);
  result.kind = MleKind::Reduced;
  result.support = reduced.states;
  result.density = density(reduced.space, a.phi);
  result.coefficients = coefficients_of(reduced.span, result.density.log_values);
  result.full_coefficients = CoefVector::Zero(span.dim());
  const auto& kept = reduced.span.kept_generators();
  for (std::size_t j = 0; j < kept.size(); ++j) {
    result.full_coefficients(kept[j]) = result.coefficients(static_cast<Eigen::Index>(j));
  }
  // Slide along -delta until the extension stays below max log p off the closure.
  if (reduced.report.witness_delta) {
    const StateVector ext = evaluate(span, result.full_coefficients);
    const StateVector delta = evaluate(span, *reduced.report.witness_delta);
    const double ceiling = result.density.log_values.maxCoeff();
    double shift = 0.0;
    for (std::size_t x : reduced.states.complement(space.size())) {
      const auto i = static_cast<Eigen::Index>(x);
      shift = std::max(shift, (ext(i) - ceiling) / delta(i));
    }
    result.full_coefficients -= shift * *reduced.report.witness_delta;
  }
  // Unnormalized weights keep this equal to the sup over the original family.
  result.log_likelihood_sup = log_likelihood(reduced.space, a.phi, reduced.sample);
  result.iterations = a.iterations;
  result.moment_residual = a.residual;
  result.step_gains = std::move(a.gains);
  result.witness_delta = std::move(reduced.report.witness_delta);
  return result;
}

bool check_exists(const StateSpace& space, const LinearSpan& span,
                  const Sample& sample, const UniquenessOptions& options) {
  check_inputs(space, span, sample);
  return is_set_of_uniqueness(span, sample_support(sample), options);
}

}  // namespace mlexist
