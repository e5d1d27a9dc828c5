#include "mlexist/families.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "mlexist/error.hpp"

namespace mlexist {

namespace {

constexpr int kMaxCubeDimension = 20;

void check_cube_dimension(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "cube dimension k must be >= 1");
  if (k > kMaxCubeDimension) {
    throw Error(ErrorCode::SpaceTooLarge,
                "Q_" + std::to_string(k) + " has too many states to enumerate");
  }
}

// Coordinate sets with |S| <= max_order, ordered by size then lexicographically.
std::vector<std::uint64_t> walsh_subsets(int k, int max_order) {
  std::vector<std::uint64_t> out;
  std::vector<int> combo;
  for (int size = 0; size <= max_order; ++size) {
    combo.resize(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) combo[static_cast<std::size_t>(i)] = i + 1;
    for (;;) {
      std::uint64_t mask = 0;
      for (int j : combo) mask |= std::uint64_t{1} << (k - j);
      out.push_back(mask);
      // next combination of {1..k}
      int i = size - 1;
      while (i >= 0 && combo[static_cast<std::size_t>(i)] == k - size + i + 1) --i;
      if (i < 0) break;
      ++combo[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) {
        combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return out;
}

CubeFamily walsh_family(int k, int max_order) {
  check_cube_dimension(k);
  const auto subsets = walsh_subsets(k, max_order);
  const Eigen::Index states = Eigen::Index{1} << k;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(subsets.size()), states);
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) = walsh_function(subsets[r], k).transpose();
  }
  return CubeFamily{k, cube_space(k), LinearSpan(rows)};
}

}  // namespace

LinearSpan full_span(const StateSpace& space) {
  const auto k = static_cast<Eigen::Index>(space.size());
  return LinearSpan(Eigen::MatrixXd::Identity(k, k));
}

bool full_exists(std::size_t state_count, const IndexSet& support) {
  return support.size() == state_count;
}

LabelledFamily two_piece_linear_family() {
  StateSpace space({"-2", "-1", "0", "1", "2"}, std::vector<double>(5, 1.0));
  Eigen::MatrixXd rows(3, 5);
  rows << 1, 1, 1, 1, 1,
          -2, -1, 0, 1, 2,
          0, 0, 0, 1, 2;
  return LabelledFamily{std::move(space), LinearSpan(rows)};
}

// --- cube -------------------------------------------------------------------

StateSpace cube_space(int k) {
  check_cube_dimension(k);
  const std::size_t count = std::size_t{1} << k;
  std::vector<std::string> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string s(static_cast<std::size_t>(k), '-');
    for (int j = 1; j <= k; ++j) {
      if (cube_coordinate(i, j, k) > 0) s[static_cast<std::size_t>(j - 1)] = '+';
    }
    labels[i] = std::move(s);
  }
  return StateSpace(std::move(labels),
                    std::vector<double>(count, std::ldexp(1.0, -k)));
}

int cube_coordinate(std::size_t state, int j, int k) noexcept {
  return ((state >> (k - j)) & 1U) ? 1 : -1;
}

bool cube_is_even(std::size_t state) noexcept {
  return std::popcount(static_cast<std::uint64_t>(state)) % 2 == 0;
}

StateVector walsh_function(std::uint64_t subset_mask, int k) {
  const Eigen::Index states = Eigen::Index{1} << k;
  StateVector w(states);
  for (Eigen::Index i = 0; i < states; ++i) {
    const auto negatives = std::popcount(subset_mask & ~static_cast<std::uint64_t>(i));
    w(i) = negatives % 2 == 0 ? 1.0 : -1.0;
  }
  return w;
}

CubeFamily rademacher_span(int k) { return walsh_family(k, 1); }

CubeFamily walsh_span(int k, int q) {
  if (q < 1 || q > k) {
    throw Error(ErrorCode::InvalidOrder,
                "need 1 <= q <= k, got k=" + std::to_string(k) + " q=" + std::to_string(q));
  }
  return walsh_family(k, q);
}

CubeFamily parity_span(int k) { return walsh_family(k, k - 1); }

std::uint64_t walsh_dimension(int k, int q) {
  std::uint64_t total = 0, binom = 1;
  for (int j = 0; j <= q && j <= k; ++j) {
    total += binom;
    binom = binom * static_cast<std::uint64_t>(k - j) / static_cast<std::uint64_t>(j + 1);
  }
  return total;
}

double entropy_bound(int k, int q) {
  const double p = static_cast<double>(q) / k;
  const double h = (p <= 0.0 || p >= 1.0)
                       ? 0.0
                       : -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
  return std::exp2(k * h);
}

bool rademacher_exists(int k, const IndexSet& support) {
  const std::uint64_t all = (k >= 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  std::uint64_t seen_plus = 0, seen_minus = 0;
  for (std::size_t x : support) {
    seen_plus |= x;
    seen_minus |= ~static_cast<std::uint64_t>(x) & all;
  }
  return (seen_plus & seen_minus) == all;
}

bool parity_exists(int k, const IndexSet& support) {
  const std::size_t half = std::size_t{1} << (k - 1);
  std::size_t even = 0, odd = 0;
  for (std::size_t x : support) (cube_is_even(x) ? even : odd) += 1;
  return even == half || odd == half;
}

// --- graphs -----------------------------------------------------------------

std::size_t edge_count(std::size_t nodes) noexcept {
  return nodes < 2 ? 0 : nodes * (nodes - 1) / 2;
}

std::size_t edge_index(std::size_t r, std::size_t s, std::size_t nodes) {
  if (r < 1 || s <= r || s > nodes) {
    throw Error(ErrorCode::IndexOutOfRange,
                "edge (" + std::to_string(r) + "," + std::to_string(s) + ")");
  }
  return (r - 1) * (2 * nodes - r) / 2 + (s - r - 1);
}

std::pair<std::size_t, std::size_t> edge_pair(std::size_t edge, std::size_t nodes) {
  if (edge >= edge_count(nodes)) throw Error(ErrorCode::IndexOutOfRange, "edge");
  std::size_t r = 1;
  while (edge >= nodes - r) {
    edge -= nodes - r;
    ++r;
  }
  return {r, r + 1 + edge};
}

std::uint64_t Graph::mask() const {
  if (edges.size() > 64) throw Error(ErrorCode::SpaceTooLarge, "more than 64 edges");
  std::uint64_t m = 0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e]) m |= std::uint64_t{1} << e;
  }
  return m;
}

Graph Graph::from_mask(std::size_t nodes, std::uint64_t mask) {
  Graph g{nodes, std::vector<bool>(edge_count(nodes), false)};
  for (std::size_t e = 0; e < g.edges.size(); ++e) g.edges[e] = (mask >> e) & 1U;
  return g;
}

double edge_probability(double c) noexcept {
  if (c >= 0.0) return 1.0 / (1.0 + std::exp(-c));
  const double e = std::exp(c);
  return e / (1.0 + e);
}

int edge_sign(std::uint64_t mask, std::size_t edge) noexcept {
  return ((mask >> edge) & 1U) ? -1 : 1;
}

StateSpace graph_space(std::size_t nodes) {
  if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "need N >= 2 nodes");
  const std::size_t edges = edge_count(nodes);
  if (edges > kMaxEnumeratedEdges) {
    throw Error(ErrorCode::SpaceTooLarge,
                "C(N,2)=" + std::to_string(edges) + " edges exceeds the enumeration cap of " +
                    std::to_string(kMaxEnumeratedEdges));
  }
  const std::size_t count = std::size_t{1} << edges;
  std::vector<std::string> labels(count);
  for (std::size_t m = 0; m < count; ++m) labels[m] = std::to_string(m);
  return StateSpace(std::move(labels), std::vector<double>(count, 1.0));
}

LinearSpan graph_span(std::size_t nodes) {
  const std::size_t edges = edge_count(nodes);
  if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "need N >= 2 nodes");
  if (edges > kMaxEnumeratedEdges) throw Error(ErrorCode::SpaceTooLarge, "graph span");
  const Eigen::Index count = Eigen::Index{1} << edges;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(edges) + 1, count);
  rows.row(0).setOnes();
  for (std::size_t e = 0; e < edges; ++e) {
    for (Eigen::Index m = 0; m < count; ++m) {
      rows(static_cast<Eigen::Index>(e) + 1, m) =
          edge_sign(static_cast<std::uint64_t>(m), e);
    }
  }
  return LinearSpan(rows);
}

StateVector graph_exponent(std::size_t nodes, const GraphParams& params) {
  const std::size_t edges = edge_count(nodes);
  if (params.c.size() != edges) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(edges) + " edge parameters, got " +
                    std::to_string(params.c.size()));
  }
  if (edges > kMaxEnumeratedEdges) throw Error(ErrorCode::SpaceTooLarge, "graph exponent");
  for (double c : params.c) {
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFiniteInput, "edge parameter");
  }
  const Eigen::Index count = Eigen::Index{1} << edges;
  StateVector phi = StateVector::Zero(count);
  for (Eigen::Index m = 0; m < count; ++m) {
    for (std::size_t e = 0; e < edges; ++e) {
      if ((static_cast<std::uint64_t>(m) >> e) & 1U) phi(m) += params.c[e];
    }
  }
  return phi;
}

GraphFamily graph_family(std::size_t nodes, const GraphParams& params) {
  StateSpace space = graph_space(nodes);
  LinearSpan span = graph_span(nodes);
  DensityTable p = density(space, graph_exponent(nodes, params));
  return GraphFamily{nodes, std::move(space), std::move(span), std::move(p)};
}

double edge_marginal(const GraphFamily& family, std::size_t edge) {
  double total = 0.0;
  for (Eigen::Index m = 0; m < family.density.values.size(); ++m) {
    if ((static_cast<std::uint64_t>(m) >> edge) & 1U) total += family.density.values(m);
  }
  return total;
}

double edge_pair_joint(const GraphFamily& family, std::size_t e1, std::size_t e2) {
  double total = 0.0;
  for (Eigen::Index m = 0; m < family.density.values.size(); ++m) {
    const auto bits = static_cast<std::uint64_t>(m);
    if (((bits >> e1) & 1U) && ((bits >> e2) & 1U)) total += family.density.values(m);
  }
  return total;
}

bool graph_exists(std::span<const Graph> graphs) {
  if (graphs.empty()) throw Error(ErrorCode::EmptySample, "no graphs given");
  const std::size_t nodes = graphs.front().nodes;
  const std::size_t edges = edge_count(nodes);
  for (const Graph& g : graphs) {
    if (g.nodes != nodes || g.edges.size() != edges) {
      throw Error(ErrorCode::MixedSizes, "graphs on different node counts");
    }
  }
  for (std::size_t e = 0; e < edges; ++e) {
    bool present = false, absent = false;
    for (const Graph& g : graphs) (g.edges[e] ? present : absent) = true;
    if (!(present && absent)) return false;
  }
  return true;
}

Graph sample_graph(std::size_t nodes, const GraphParams& params, RandomStream& rng) {
  const std::size_t edges = edge_count(nodes);
  if (params.c.size() != edges) {
    throw Error(ErrorCode::DimensionMismatch, "edge parameter count");
  }
  Graph g{nodes, std::vector<bool>(edges, false)};
  for (std::size_t e = 0; e < edges; ++e) {
    g.edges[e] = rng.bernoulli(edge_probability(params.c[e]));
  }
  return g;
}

// --- closed forms -----------------------------------------------------------

RademacherProbability exists_probability_rademacher(int k, int n) {
  if (k < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "need k >= 1 and n >= 1");
  const double miss = std::ldexp(1.0, 1 - n);  // P(one coordinate shows one sign)
  return RademacherProbability{std::exp(k * std::log1p(-miss)), 1.0 - k * miss};
}

double exists_probability_graphs(int n, const GraphParams& params) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  double product = 1.0;
  for (double c : params.c) {
    const double p = edge_probability(c);
    product *= 1.0 - std::pow(p, n) - std::pow(1.0 - p, n);
  }
  return product;
}

double harmonic_number(int k) {
  double h = 0.0;
  for (int i = k; i >= 1; --i) h += 1.0 / i;
  return h;
}

std::pair<double, double> eisenberg_bounds(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "need k >= 1");
  const double base = harmonic_number(k) / std::numbers::ln2;
  return {base + 1.0, base + 2.0};
}

}  // namespace mlexist
