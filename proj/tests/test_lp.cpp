#include <doctest.h>

#include <random>

#include "mlexist/families.hpp"
#include "mlexist/lp.hpp"
#include "mlexist/uniqueness.hpp"

using namespace mlexist;

namespace {

Eigen::RowVectorXd row(std::initializer_list<double> v) {
  Eigen::RowVectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

}  // namespace

TEST_CASE("single variable problems") {
  lp::Problem p;
  p.variables = 1;
  p.nonnegative.push_back(row({1}));
  p.normalization = row({1});
  const lp::Outcome ok = lp::solve_feasibility(p);
  REQUIRE(ok.feasible());
  CHECK((*ok.witness)(0) == doctest::Approx(1.0));

  p.nonnegative.push_back(row({-1}));
  const lp::Outcome bad = lp::solve_feasibility(p);
  CHECK_FALSE(bad.feasible());
  CHECK_FALSE(bad.witness.has_value());
}

TEST_CASE("escape problem on the two-piece linear family") {
  const LabelledFamily f = two_piece_linear_family();
  const IndexSet u{f.space.index_of("-1"), f.space.index_of("2")};
  const lp::Problem p = escape_problem(f.span, u, f.space.index_of("-2"));
  CHECK_FALSE(lp::solve_feasibility(p).feasible());

  // From {-2, 2} the middle point can still be lifted.
  const IndexSet v{f.space.index_of("-2"), f.space.index_of("2")};
  const lp::Outcome o = lp::solve_feasibility(escape_problem(f.span, v, f.space.index_of("0")));
  REQUIRE(o.feasible());
  CHECK(lp::max_violation(escape_problem(f.span, v, 2), *o.witness) <= 1e-7);
}

TEST_CASE("random feasible problems return valid witnesses") {
  std::mt19937_64 gen(19);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(gen() % 6);
    Eigen::VectorXd a0(d);
    for (auto& v : a0) v = normal(gen);
    Eigen::RowVectorXd n(d);
    for (auto& v : n) v = normal(gen);
    if (std::abs(n.dot(a0)) < 1e-2) continue;
    a0 /= n.dot(a0);  // now n.a0 = 1

    lp::Problem p;
    p.variables = d;
    p.normalization = n;
    const int m = static_cast<int>(gen() % 12);
    for (int i = 0; i < m; ++i) {
      Eigen::RowVectorXd r(d);
      for (auto& v : r) v = normal(gen);
      if (r.dot(a0) < 0) r = -r;
      p.nonnegative.push_back(r);
    }
    if (d > 1 && gen() % 2) {
      Eigen::RowVectorXd e(d);
      for (auto& v : e) v = normal(gen);
      p.equalities.push_back({e, e.dot(a0)});
    }
    const lp::Outcome o = lp::solve_feasibility(p);
    REQUIRE(o.feasible());
    CHECK(lp::max_violation(p, *o.witness) <= 1e-7);
    CHECK(o.pivots <= 10 * (static_cast<std::size_t>(d) + p.constraint_count()));
  }
}

TEST_CASE("infeasible by construction") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(gen() % 5);
    Eigen::RowVectorXd r(d);
    for (auto& v : r) v = normal(gen);
    lp::Problem p;
    p.variables = d;
    p.nonnegative.push_back(r);
    p.nonnegative.push_back(-r);
    for (int i = 0; i < 3; ++i) {
      Eigen::RowVectorXd extra(d);
      for (auto& v : extra) v = normal(gen);
      p.nonnegative.push_back(extra);
    }
    p.normalization = r;  // r.a = 1 contradicts r.a = 0
    CHECK_FALSE(lp::solve_feasibility(p).feasible());
  }
}

TEST_CASE("degenerate problems terminate") {
  // Many identical and proportional rows create ties in the ratio test.
  lp::Problem p;
  p.variables = 3;
  for (int i = 0; i < 20; ++i) {
    p.nonnegative.push_back(row({1, -1, 0}) * (1 + i % 3));
    p.nonnegative.push_back(row({0, 1, -1}));
  }
  p.equalities.push_back({row({1, 1, 1}), 0});
  p.normalization = row({1, 0, 0});
  const lp::Outcome o = lp::solve_feasibility(p);
  // a1 >= a2 >= a3, sum 0, a1 = 1 is feasible (1, 0, -1).
  REQUIRE(o.feasible());
  CHECK(lp::max_violation(p, *o.witness) <= 1e-7);
}

TEST_CASE("solver is deterministic") {
  const CubeFamily w = walsh_span(3, 2);
  const lp::Problem p = escape_problem(w.span, IndexSet{0, 3, 5}, 6);
  const lp::Outcome a = lp::solve_feasibility(p);
  const lp::Outcome b = lp::solve_feasibility(p);
  CHECK(a.status == b.status);
  CHECK(a.pivots == b.pivots);
  if (a.witness) CHECK(*a.witness == *b.witness);
}
