#include <doctest.h>

#include <cmath>
#include <random>

#include "mlexist/error.hpp"
#include "mlexist/expfam.hpp"
#include "mlexist/families.hpp"
#include "support/oracles.hpp"

using namespace mlexist;

namespace {

StateSpace uniform_space(std::size_t k) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back(std::to_string(i));
  return StateSpace(labels, std::vector<double>(k, 1.0));
}

StateVector random_vector(std::mt19937_64& gen, Eigen::Index k, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  StateVector v(k);
  for (auto& x : v) x = normal(gen);
  return v;
}

}  // namespace

TEST_CASE("two-state log partition") {
  const StateSpace s = uniform_space(2);
  for (double a : {-3.0, 0.0, 2.0})
    for (double b : {-5.0, 0.5, 40.0}) {
      const StateVector phi = (StateVector(2) << a, a + b).finished();
      CHECK(log_partition(s, phi) == doctest::Approx(a + std::log1p(std::exp(b))));
    }
  CHECK(log_partition(uniform_space(7), StateVector::Zero(7)) == doctest::Approx(std::log(7.0)));
}

TEST_CASE("log partition matches a long double oracle and shifts") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(gen() % 20);
    std::vector<double> mu(static_cast<std::size_t>(k));
    for (auto& m : mu) m = 0.1 + static_cast<double>(gen() % 100) / 10.0;
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < k; ++i) labels.push_back(std::to_string(i));
    const StateSpace s(labels, mu);
    const StateVector phi = random_vector(gen, k, 3.0);
    CHECK(log_partition(s, phi) ==
          doctest::Approx(static_cast<double>(oracle::log_partition(phi, mu))).epsilon(1e-12));
    CHECK(log_partition(s, (phi.array() + 5.0).matrix()) - log_partition(s, phi) ==
          doctest::Approx(5.0).epsilon(1e-12));
  }
}

TEST_CASE("large exponents do not overflow") {
  const StateSpace s = uniform_space(3);
  const StateVector phi = (StateVector(3) << 1e4, -1e4, 9999.0).finished();
  const double psi = log_partition(s, phi);
  CHECK(std::isfinite(psi));
  CHECK(psi == doctest::Approx(1e4 + std::log1p(std::exp(-1.0))));
  const DensityTable p = density(s, phi);
  CHECK(p.values.allFinite());
  CHECK(p.values.sum() == doctest::Approx(1.0));
}

TEST_CASE("density, normalization and positivity") {
  const StateSpace s = uniform_space(2);
  const double b = 0.7;
  const DensityTable p = density(s, (StateVector(2) << 0.0, b).finished());
  CHECK(p.values(0) == doctest::Approx(1.0 / (1.0 + std::exp(b))));
  CHECK(p.values(1) == doctest::Approx(std::exp(b) / (1.0 + std::exp(b))));

  std::mt19937_64 gen(43);
  const CubeFamily w = walsh_span(3, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const CoefVector a = random_vector(gen, w.span.dim(), 2.0);
    const DensityTable q = density(w.space, w.span, a);
    double mass = 0.0;
    for (Eigen::Index x = 0; x < q.values.size(); ++x) {
      CHECK(q.values(x) > 0.0);
      mass += q.values(x) * w.space.weight(static_cast<std::size_t>(x));
    }
    CHECK(std::abs(mass - 1.0) <= 1e-10);
  }
  const DensityTable flat = density(w.space, w.span, CoefVector::Zero(w.span.dim()));
  CHECK((flat.values.array() - 1.0 / w.space.total_weight()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("log likelihood") {
  const StateSpace s = uniform_space(2);
  const Sample sample(s, {0, 0, 1});
  const StateVector phi = (StateVector(2) << 0.0, std::log(0.5)).finished();
  CHECK(log_likelihood(s, phi, sample) == doctest::Approx(std::log(4.0 / 27.0)).epsilon(1e-14));
  CHECK(log_likelihood(s, StateVector::Zero(2), sample) == doctest::Approx(-3 * std::log(2.0)));

  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 30; ++trial) {
    const StateSpace big = uniform_space(6);
    std::vector<std::size_t> xs(1 + gen() % 10);
    for (auto& x : xs) x = gen() % 6;
    const StateVector f = random_vector(gen, 6, 1.0);
    const DensityTable p = density(big, f);
    double sum = 0.0;
    for (std::size_t x : xs) sum += p.log_values(static_cast<Eigen::Index>(x));
    CHECK(log_likelihood(big, f, Sample(big, xs)) == doctest::Approx(sum));
  }
}

TEST_CASE("likelihood is bounded by (min mu)^-n") {
  std::mt19937_64 gen(53);
  const StateSpace s({"a", "b", "c"}, {0.5, 2.0, 3.0});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> xs(1 + gen() % 5);
    for (auto& x : xs) x = gen() % 3;
    const Sample sample(s, xs);
    const double l = log_likelihood(s, random_vector(gen, 3, 10.0), sample);
    CHECK(l <= -static_cast<double>(xs.size()) * s.min_log_weight() + 1e-12);
  }
}

TEST_CASE("moments") {
  const CubeFamily rad = rademacher_span(3);
  const Moments m = moments(rad.space, rad.span, CoefVector::Zero(rad.span.dim()));
  CHECK(m.mean(0) == doctest::Approx(1.0));
  for (Eigen::Index j = 1; j < m.mean.size(); ++j) CHECK(std::abs(m.mean(j)) < 1e-12);
  CHECK(m.covariance.row(0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.covariance.col(0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("covariance is the second derivative of psi") {
  std::mt19937_64 gen(59);
  const CubeFamily w = walsh_span(3, 2);
  const double h = 1e-4;
  for (int trial = 0; trial < 30; ++trial) {
    const CoefVector a = random_vector(gen, w.span.dim(), 1.0);
    const CoefVector v = random_vector(gen, w.span.dim(), 1.0);
    auto psi = [&](double t) { return log_partition(w.space, evaluate(w.span, a + t * v)); };
    const double second = (psi(h) - 2 * psi(0) + psi(-h)) / (h * h);
    const Moments m = moments(w.space, w.span, a);
    CHECK(std::abs(second - v.dot(m.covariance * v)) <= 1e-5 * std::max(1.0, std::abs(second)));
    // first derivative is the mean
    const double first = (psi(h) - psi(-h)) / (2 * h);
    CHECK(first == doctest::Approx(v.dot(m.mean)).epsilon(1e-6));
  }
}

TEST_CASE("psi is convex along segments, strictly for non-constant directions") {
  std::mt19937_64 gen(61);
  const StateSpace s = uniform_space(8);
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector f0 = random_vector(gen, 8, 2.0);
    const StateVector f1 = random_vector(gen, 8, 2.0);
    const double mid = log_partition(s, (f0 + f1) / 2);
    const double avg = (log_partition(s, f0) + log_partition(s, f1)) / 2;
    CHECK(mid < avg);
    const StateVector shifted = (f0.array() + 1.5).matrix();
    CHECK(log_partition(s, (f0 + shifted) / 2) ==
          doctest::Approx((log_partition(s, f0) + log_partition(s, shifted)) / 2));
  }
}

TEST_CASE("dimension checks") {
  const StateSpace s = uniform_space(3);
  CHECK_THROWS_AS(log_partition(s, StateVector::Zero(2)), Error);
  StateVector bad = StateVector::Zero(3);
  bad(1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(log_partition(s, bad), Error);
}
