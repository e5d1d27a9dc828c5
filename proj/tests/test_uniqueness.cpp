#include <doctest.h>

#include <random>

#include "mlexist/error.hpp"
#include "mlexist/families.hpp"
#include "mlexist/uniqueness.hpp"
#include "support/oracles.hpp"

using namespace mlexist;

namespace {

IndexSet labels_to_set(const StateSpace& space, std::initializer_list<const char*> labels) {
  std::vector<std::size_t> v;
  for (const char* l : labels) v.push_back(space.index_of(l));
  return IndexSet::from_unsorted(v);
}

IndexSet from_mask(std::uint64_t mask, std::size_t states) {
  std::vector<std::size_t> v;
  for (std::size_t x = 0; x < states; ++x)
    if ((mask >> x) & 1U) v.push_back(x);
  return IndexSet::from_unsorted(v);
}

void check_witness(const LinearSpan& span, const UniquenessReport& r) {
  if (r.is_uniqueness) {
    CHECK_FALSE(r.witness_delta.has_value());
    return;
  }
  REQUIRE(r.witness_delta.has_value());
  const StateVector d = evaluate(span, *r.witness_delta);
  for (Eigen::Index x = 0; x < d.size(); ++x) {
    CHECK(d(x) >= -1e-7);
    if (r.closure.contains(static_cast<std::size_t>(x))) {
      CHECK(std::abs(d(x)) <= 1e-7);
    } else {
      CHECK(d(x) >= 0.5);
    }
  }
}

}  // namespace

TEST_CASE("two-piece linear family") {
  const LabelledFamily f = two_piece_linear_family();
  CHECK(is_set_of_uniqueness(f.span, labels_to_set(f.space, {"-1", "2"})));
  CHECK_FALSE(is_set_of_uniqueness(f.span, labels_to_set(f.space, {"-2", "2"})));
  CHECK(closure(f.span, labels_to_set(f.space, {"-1"})).closure ==
        labels_to_set(f.space, {"-2", "-1", "0"}));
  CHECK(closure(f.span, labels_to_set(f.space, {"-2"})).closure ==
        labels_to_set(f.space, {"-2"}));
  CHECK(is_set_of_uniqueness(f.span, IndexSet::all(5)));
}

TEST_CASE("input validation") {
  const LabelledFamily f = two_piece_linear_family();
  CHECK_THROWS_AS(closure(f.span, IndexSet{}), Error);
  CHECK_THROWS_AS(closure(f.span, IndexSet{9}), Error);
  CHECK_THROWS_AS(monotonicity_check(f.span, IndexSet{0, 1}, IndexSet{1}), Error);
}

TEST_CASE("Rademacher: one coordinate of constant sign") {
  for (int k = 2; k <= 4; ++k) {
    const CubeFamily rad = rademacher_span(k);
    // All states with r_1 = +1 and the first two of them cover the other signs.
    std::vector<std::size_t> u;
    for (std::size_t x = 0; x < rad.space.size(); ++x)
      if (cube_coordinate(x, 1, k) > 0) u.push_back(x);
    // keep a subset that still has both signs in coordinates 2..k
    const IndexSet subset{u.front(), u.back()};
    const UniquenessReport r = closure(rad.span, subset);
    CHECK_FALSE(r.is_uniqueness);
    CHECK(r.closure == IndexSet::from_unsorted(u));
    REQUIRE(r.witness_delta);
    const CoefVector& d = *r.witness_delta;
    // delta is a positive multiple of r_0 - r_1
    CHECK(d(0) > 0.0);
    CHECK(d(1) == doctest::Approx(-d(0)).epsilon(1e-9));
    for (Eigen::Index j = 2; j < d.size(); ++j) CHECK(std::abs(d(j)) < 1e-9);
  }
}

TEST_CASE("Rademacher closure is the intersection of the constant half-cubes") {
  const int k = 4;
  const CubeFamily rad = rademacher_span(k);
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::size_t> u(1 + gen() % 4);
    for (auto& x : u) x = gen() % 16;
    const IndexSet subset = IndexSet::from_unsorted(u);
    std::vector<std::size_t> expected;
    for (std::size_t x = 0; x < 16; ++x) {
      bool inside = true;
      for (int j = 1; j <= k; ++j) {
        bool plus = false, minus = false;
        for (std::size_t y : subset) (cube_coordinate(y, j, k) > 0 ? plus : minus) = true;
        if (plus != minus && (cube_coordinate(x, j, k) > 0) != plus) inside = false;
      }
      if (inside) expected.push_back(x);
    }
    const UniquenessReport r = closure(rad.span, subset);
    CHECK(r.closure == IndexSet::from_unsorted(expected));
    check_witness(rad.span, r);
  }
}

TEST_CASE("closure properties on random spans") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index k = 4 + static_cast<Eigen::Index>(gen() % 6);
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(gen() % 3);
    Eigen::MatrixXd g(d, k);
    g.row(0).setOnes();
    for (Eigen::Index i = 1; i < d; ++i)
      for (Eigen::Index x = 0; x < k; ++x) g(i, x) = std::round(2 * normal(gen));
    const LinearSpan span(g);
    const std::uint64_t states = static_cast<std::uint64_t>(k);
    const std::uint64_t mask_u = 1 + gen() % ((std::uint64_t{1} << states) - 1);
    const std::uint64_t mask_v = mask_u | (gen() % (std::uint64_t{1} << states));
    const IndexSet u = from_mask(mask_u, k), v = from_mask(mask_v, k);

    const UniquenessReport ru = closure(span, u);
    const UniquenessReport rv = closure(span, v);
    CHECK(ru.closure.includes(u));
    CHECK(closure(span, ru.closure).closure == ru.closure);
    CHECK(rv.closure.includes(ru.closure));
    CHECK(ru.is_uniqueness == (ru.closure.size() == static_cast<std::size_t>(k)));
    CHECK(monotonicity_check(span, u, v));
    check_witness(span, ru);
    check_witness(span, rv);
  }
}

TEST_CASE("monotonicity, exhaustive single-point extensions on Rademacher k=3") {
  const CubeFamily rad = rademacher_span(3);
  for (std::uint64_t mask = 1; mask < 256; ++mask) {
    const IndexSet u = from_mask(mask, 8);
    for (std::size_t x = 0; x < 8; ++x) {
      CHECK(monotonicity_check(rad.span, u, u.united(IndexSet{x})));
    }
  }
}

TEST_CASE("randomized criterion agreement for k = 4, 5") {
  std::mt19937_64 gen(37);
  for (int k = 4; k <= 5; ++k) {
    const CubeFamily rad = rademacher_span(k);
    const CubeFamily parity = parity_span(k);
    const std::size_t states = rad.space.size();
    for (int trial = 0; trial < 120; ++trial) {
      std::vector<std::size_t> u(1 + gen() % (states / 2 + 2));
      for (auto& x : u) x = gen() % states;
      if (trial % 4 == 0) {
        // dense subsets so parity classes are sometimes covered
        u.clear();
        const bool even = gen() % 2;
        for (std::size_t x = 0; x < states; ++x)
          if (cube_is_even(x) == even || gen() % 4 == 0) u.push_back(x);
      }
      const IndexSet subset = IndexSet::from_unsorted(u);
      std::vector<std::string> labels;
      for (std::size_t x : subset) labels.push_back(rad.space.label(x));
      CHECK(is_set_of_uniqueness(rad.span, subset) == oracle::rademacher_criterion(labels));
      CHECK(is_set_of_uniqueness(parity.span, subset) ==
            oracle::parity_criterion(labels, static_cast<std::size_t>(k)));
    }
  }
}

TEST_CASE("coefficient domination on Rademacher witnesses") {
  const CubeFamily rad = rademacher_span(3);
  for (std::uint64_t mask = 1; mask < 256; mask += 3) {
    const UniquenessReport r = closure(rad.span, from_mask(mask, 8));
    for (const auto& [x, a] : r.escape_witnesses) {
      CHECK(a(0) >= a.tail(a.size() - 1).cwiseAbs().sum() - 1e-7);
    }
  }
}

TEST_CASE("threaded closure equals sequential closure") {
  const CubeFamily w = walsh_span(4, 2);
  UniquenessOptions threaded;
  threaded.threads = 3;
  for (std::uint64_t mask : {0x1ULL, 0x8421ULL, 0x0f0fULL, 0x6996ULL, 0xfffeULL}) {
    const IndexSet u = from_mask(mask, 16);
    const UniquenessReport a = closure(w.span, u);
    const UniquenessReport b = closure(w.span, u, threaded);
    CHECK(a.closure == b.closure);
    CHECK(a.escape_witnesses.size() == b.escape_witnesses.size());
    if (a.witness_delta) CHECK(*a.witness_delta == *b.witness_delta);
  }
}
