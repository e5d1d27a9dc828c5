#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mlexist/expfam.hpp"
#include "mlexist/linspan.hpp"
#include "mlexist/rng.hpp"
#include "mlexist/statespace.hpp"

namespace mlexist {

// --- general spaces ---------------------------------------------------------

/// B = R^X, one indicator per state.
LinearSpan full_span(const StateSpace& space);

/// Existence for the full span: the support is all of X.
bool full_exists(std::size_t state_count, const IndexSet& support);

/// X = {-2,-1,0,1,2}, mu = 1, B = functions affine on {-2,-1,0} and on
/// {0,1,2} (basis 1, x, max(x,0)). A span where nonnegativity matters.
struct LabelledFamily {
  StateSpace space;
  LinearSpan span;
};
LabelledFamily two_piece_linear_family();

// --- sign cube Q_k ----------------------------------------------------------

/// Q_k = {-1,+1}^k in lexicographic order with -1 < +1: state index i has
/// coordinate j (1-based) equal to +1 iff bit (k - j) of i is set.
/// Labels are sign strings such as "-+-"; weights are 2^-k.
struct CubeFamily {
  int k;
  StateSpace space;
  LinearSpan span;
};

StateSpace cube_space(int k);

/// r_j(state) for j in 1..k.
int cube_coordinate(std::size_t state, int j, int k) noexcept;

/// Number of +1 coordinates is even (E) or odd (O).
bool cube_is_even(std::size_t state) noexcept;

/// w_S on Q_k for the coordinate set encoded in `subset_mask` (bit k - j
/// set when j is in S, matching the state encoding).
StateVector walsh_function(std::uint64_t subset_mask, int k);

/// B^k = Lin{1, r_1, ..., r_k}.
CubeFamily rademacher_span(int k);

/// B^k_q = Lin{w_S : |S| <= q}; 1 <= q <= k, otherwise InvalidOrder.
/// Basis rows ordered by |S|, then lexicographically.
CubeFamily walsh_span(int k, int q);

/// B^k_{k-1}, for k >= 1 (for k = 1 this is the constants).
CubeFamily parity_span(int k);

/// sum_{j <= q} C(k, j).
std::uint64_t walsh_dimension(int k, int q);

/// 2^{k H2(q/k)} with H2 the binary entropy in bits.
double entropy_bound(int k, int q);

/// Existence for B^k: every coordinate takes both signs on the support.
bool rademacher_exists(int k, const IndexSet& support);

/// Existence for B^k_{k-1}: the support covers E or covers O.
bool parity_exists(int k, const IndexSet& support);

// --- random graphs on N nodes -----------------------------------------------

std::size_t edge_count(std::size_t nodes) noexcept;
/// Edge (r, s), 1 <= r < s <= N, in lexicographic order.
std::size_t edge_index(std::size_t r, std::size_t s, std::size_t nodes);
std::pair<std::size_t, std::size_t> edge_pair(std::size_t edge, std::size_t nodes);

constexpr std::size_t kMaxEnumeratedEdges = 20;

/// Simple undirected graph as an edge-indexed membership vector.
struct Graph {
  std::size_t nodes = 0;
  std::vector<bool> edges;

  bool has_edge(std::size_t e) const { return edges[e]; }
  /// Bitmask state index (edge e <-> bit e); needs C(N,2) <= 64.
  std::uint64_t mask() const;
  static Graph from_mask(std::size_t nodes, std::uint64_t mask);
};

/// Edge parameters c_{r,s}, indexed by edge_index.
struct GraphParams {
  std::vector<double> c;

  static GraphParams zeros(std::size_t nodes) {
    return GraphParams{std::vector<double>(edge_count(nodes), 0.0)};
  }
};

/// P(edge present) = e^c / (1 + e^c).
double edge_probability(double c) noexcept;

/// chi_{r,s}(G) = 1 - 2 * [edge (r,s) in G].
int edge_sign(std::uint64_t mask, std::size_t edge) noexcept;

/// All graphs on N nodes as bitmask states, mu = 1. SpaceTooLarge when
/// C(N,2) > 20.
StateSpace graph_space(std::size_t nodes);

/// Lin{1, chi_{r,s}}.
LinearSpan graph_span(std::size_t nodes);

/// Exponent of p_c: phi_c(G) = sum_{(r,s) in G} c_{r,s}, which lies in
/// graph_span since [edge in G] = (1 - chi)/2.
StateVector graph_exponent(std::size_t nodes, const GraphParams& params);

struct GraphFamily {
  std::size_t nodes;
  StateSpace space;
  LinearSpan span;
  DensityTable density;
};
GraphFamily graph_family(std::size_t nodes, const GraphParams& params);

/// Exact P(edge in G) and P(e1 in G, e2 in G) under an enumerated density.
double edge_marginal(const GraphFamily& family, std::size_t edge);
double edge_pair_joint(const GraphFamily& family, std::size_t e1, std::size_t e2);

/// Existence for the graph span: union is K_N and intersection is empty.
bool graph_exists(std::span<const Graph> graphs);

/// Draws G ~ p_c by including each edge independently; no enumeration.
Graph sample_graph(std::size_t nodes, const GraphParams& params, RandomStream& rng);

// --- closed forms -----------------------------------------------------------

struct RademacherProbability {
  double exact;            // (1 - 2^{1-n})^k
  double bernoulli_lower;  // 1 - k 2^{1-n}
};
RademacherProbability exists_probability_rademacher(int k, int n);

/// prod_e (1 - p_e^n - (1 - p_e)^n).
double exists_probability_graphs(int n, const GraphParams& params);

double harmonic_number(int k);

/// (H_k / log 2 + 1, H_k / log 2 + 2), bracketing E(nu_uniq) for B^k.
std::pair<double, double> eisenberg_bounds(int k);

}  // namespace mlexist
