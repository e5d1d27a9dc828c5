#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlexist/rng.hpp"
#include "mlexist/uniqueness.hpp"

namespace mlexist {

enum class FamilyKind { Full, Rademacher, Walsh, Graph };

/// Which family to sample from. Full and cube families are sampled from the
/// uniform member (phi = 0, mu uniform); graphs from p_c.
struct FamilySpec {
  FamilyKind kind = FamilyKind::Full;
  /// K for Full, k for Rademacher and Walsh, N for Graph.
  std::size_t size = 1;
  /// Walsh order q (ignored otherwise).
  int q = 1;
  /// Graph edge parameters, indexed by edge_index; empty means c = 0.
  std::vector<double> c;

  static FamilySpec full(std::size_t states) { return {FamilyKind::Full, states, 1, {}}; }
  static FamilySpec rademacher(std::size_t k) { return {FamilyKind::Rademacher, k, 1, {}}; }
  static FamilySpec walsh(std::size_t k, int q) { return {FamilyKind::Walsh, k, q, {}}; }
  static FamilySpec graph(std::size_t nodes, std::vector<double> c = {}) {
    return {FamilyKind::Graph, nodes, 1, std::move(c)};
  }
};

std::string to_string(FamilyKind kind);

enum class Estimator {
  Existence,  // P(MLE exists) at sample size n
  NuMean,     // E(nu_uniq)
  NuTail,     // P(nu_uniq < t)
};

struct ExperimentConfig {
  FamilySpec family;
  std::size_t n = 1;
  std::uint64_t replicates = 100000;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::Existence;
  double tail_t = 0.0;
  unsigned threads = 1;
  /// Used only where no combinatorial criterion exists (Walsh 2 <= q <= k-2).
  UniquenessOptions lp;
};

struct ExperimentSummary {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t replicates = 0;
  std::optional<double> reference;
  std::optional<double> z;
};

/// Per-replicate cap on draws when simulating nu_uniq.
constexpr std::uint64_t kMaxDrawsPerReplicate = 10'000'000;

/// Fraction of replicates whose n-sample admits an MLE. Replicate i draws
/// from RandomStream(seed, i).
ExperimentSummary estimate_existence_probability(const ExperimentConfig& cfg);

/// Mean (NuMean) or tail P(nu < t) (NuTail) of the first n at which the
/// sample support becomes a set of uniqueness. BudgetExceeded past
/// kMaxDrawsPerReplicate draws in one replicate.
ExperimentSummary estimate_nu_uniq(const ExperimentConfig& cfg);

/// Dispatches on cfg.estimator.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

enum class ThresholdBase {
  KLogK,       // K log K, full span
  Log2K,       // log2 k, Rademacher
  K2kLog2,     // k 2^k log 2, full Walsh span
  K2k,         // k 2^k, B^k_{k-q}
  LogN,        // log N, graphs
};

double threshold_base_value(ThresholdBase base, std::size_t size);

struct SweepRow {
  double multiplier = 0.0;
  std::size_t n = 0;
  ExperimentSummary summary;
};

/// Existence probability at n = max(1, ceil(m * base)) for each multiplier.
std::vector<SweepRow> threshold_sweep(const ExperimentConfig& cfg,
                                      std::span<const double> multipliers,
                                      ThresholdBase base);

// --- single replicates ------------------------------------------------------

/// Uniform draw from Q_k packed as ceil(k/64) words. Coordinate j (1-based)
/// is +1 iff bit 63 - (j-1)%64 of word (j-1)/64 is set; unused low bits of
/// the last word are zero. For k <= 64 the state index is words[0] >> (64-k).
std::vector<std::uint64_t> draw_cube_words(std::size_t k, RandomStream& rng);

/// nu_uniq for one replicate, simulated incrementally.
std::uint64_t simulate_nu(const FamilySpec& family, RandomStream& rng,
                          const UniquenessOptions& lp = {});

/// Existence for one replicate of size n.
bool simulate_exists(const FamilySpec& family, std::size_t n, RandomStream& rng,
                     const UniquenessOptions& lp = {});

// --- exact references -------------------------------------------------------

/// P(n uniform draws from K states cover all of them).
double coverage_probability(std::size_t states, std::size_t n);

/// Exact P(MLE exists) for the family at sample size n, when known.
std::optional<double> exact_existence_probability(const FamilySpec& family, std::size_t n);

/// Exact P(nu_uniq <= m), when known.
std::optional<double> exact_nu_cdf(const FamilySpec& family, std::size_t m);

/// Exact E(nu_uniq), when known.
std::optional<double> exact_nu_mean(const FamilySpec& family);

}  // namespace mlexist
