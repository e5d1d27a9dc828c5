#include "mlexist/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "mlexist/error.hpp"
#include "mlexist/families.hpp"

namespace mlexist {

namespace {

constexpr std::size_t kMaxIndexedCube = 20;

std::size_t word_count(std::size_t k) { return (k + 63) / 64; }

std::uint64_t last_word_mask(std::size_t k) {
  const std::size_t r = k % 64;
  return r == 0 ? ~std::uint64_t{0} : ~std::uint64_t{0} << (64 - r);
}

std::size_t draw_cube_index(std::size_t k, RandomStream& rng) {
  return static_cast<std::size_t>(rng() >> (64 - k));
}

enum class Criterion { Coverage, Rademacher, Parity, Lp, Graph };

// Everything a replicate needs, built once per experiment.
class Simulator {
 public:
  Simulator(const FamilySpec& family, const UniquenessOptions& lp) : lp_(lp) {
    switch (family.kind) {
      case FamilyKind::Full:
        if (family.size < 1) throw Error(ErrorCode::EmptySpace, "full family needs K >= 1");
        criterion_ = Criterion::Coverage;
        states_ = family.size;
        break;
      case FamilyKind::Rademacher:
        if (family.size < 1) throw Error(ErrorCode::InvalidArgument, "need k >= 1");
        criterion_ = Criterion::Rademacher;
        k_ = family.size;
        break;
      case FamilyKind::Walsh: {
        const auto k = family.size;
        if (k < 1) throw Error(ErrorCode::InvalidArgument, "need k >= 1");
        if (family.q < 1 || static_cast<std::size_t>(family.q) > k) {
          throw Error(ErrorCode::InvalidOrder, "need 1 <= q <= k");
        }
        const auto q = static_cast<std::size_t>(family.q);
        k_ = k;
        if (q == 1 && q != k) {
          criterion_ = Criterion::Rademacher;
          break;
        }
        if (k > kMaxIndexedCube) {
          throw Error(ErrorCode::SpaceTooLarge, "Walsh family with k > 20 and q > 1");
        }
        states_ = std::size_t{1} << k;
        if (q == k) {
          criterion_ = Criterion::Coverage;
        } else if (q + 1 == k) {
          criterion_ = Criterion::Parity;
        } else {
          criterion_ = Criterion::Lp;
          span_.emplace(walsh_span(static_cast<int>(k), family.q).span);
        }
        break;
      }
      case FamilyKind::Graph: {
        if (family.size < 2) throw Error(ErrorCode::InvalidArgument, "need N >= 2");
        const std::size_t edges = edge_count(family.size);
        if (!family.c.empty() && family.c.size() != edges) {
          throw Error(ErrorCode::DimensionMismatch,
                      "expected " + std::to_string(edges) + " edge parameters");
        }
        criterion_ = Criterion::Graph;
        edge_p_.assign(edges, 0.5);
        for (std::size_t e = 0; e < family.c.size(); ++e) {
          if (!std::isfinite(family.c[e])) {
            throw Error(ErrorCode::NonFiniteInput, "edge parameter");
          }
          edge_p_[e] = edge_probability(family.c[e]);
        }
        break;
      }
    }
  }

  bool exists(std::size_t n, RandomStream& rng) const {
    switch (criterion_) {
      case Criterion::Coverage: {
        std::vector<char> seen(states_, 0);
        std::size_t distinct = 0;
        for (std::size_t i = 0; i < n && distinct < states_; ++i) {
          const std::size_t x = draw_state(rng);
          if (!seen[x]) { seen[x] = 1; ++distinct; }
        }
        return distinct == states_;
      }
      case Criterion::Rademacher: {
        SignTracker t(k_);
        for (std::size_t i = 0; i < n && !t.done(); ++i) t.add(draw_cube_words(k_, rng));
        return t.done();
      }
      case Criterion::Parity: {
        ParityTracker t(states_);
        for (std::size_t i = 0; i < n && !t.done(); ++i) t.add(draw_state(rng));
        return t.done();
      }
      case Criterion::Lp: {
        std::vector<std::size_t> drawn(n);
        for (auto& x : drawn) x = draw_state(rng);
        return is_set_of_uniqueness(*span_, IndexSet::from_unsorted(std::move(drawn)), lp_);
      }
      case Criterion::Graph:
        // Edges are independent, so each edge's n indicators can be drawn in turn.
        for (double p : edge_p_) {
          bool present = false, absent = false;
          for (std::size_t i = 0; i < n && !(present && absent); ++i) {
            (rng.bernoulli(p) ? present : absent) = true;
          }
          if (!(present && absent)) return false;
        }
        return true;
    }
    return false;
  }

  std::uint64_t nu(RandomStream& rng) const {
    std::uint64_t draws = 0;
    auto count_draw = [&draws] {
      if (++draws > kMaxDrawsPerReplicate) {
        throw Error(ErrorCode::BudgetExceeded,
                    "nu_uniq simulation exceeded " + std::to_string(kMaxDrawsPerReplicate) +
                        " draws");
      }
    };
    switch (criterion_) {
      case Criterion::Coverage: {
        std::vector<char> seen(states_, 0);
        std::size_t distinct = 0;
        while (distinct < states_) {
          count_draw();
          const std::size_t x = draw_state(rng);
          if (!seen[x]) { seen[x] = 1; ++distinct; }
        }
        return draws;
      }
      case Criterion::Rademacher: {
        SignTracker t(k_);
        while (!t.done()) {
          count_draw();
          t.add(draw_cube_words(k_, rng));
        }
        return draws;
      }
      case Criterion::Parity: {
        ParityTracker t(states_);
        while (!t.done()) {
          count_draw();
          t.add(draw_state(rng));
        }
        return draws;
      }
      case Criterion::Lp: {
        std::vector<char> seen(states_, 0);
        std::vector<std::size_t> support;
        for (;;) {
          count_draw();
          const std::size_t x = draw_state(rng);
          if (seen[x]) continue;
          seen[x] = 1;
          support.push_back(x);
          if (is_set_of_uniqueness(*span_, IndexSet::from_unsorted(support), lp_)) {
            return draws;
          }
        }
      }
      case Criterion::Graph: {
        // Edge-level reduction: nu is the largest per-edge waiting time.
        std::uint64_t worst = 0;
        for (double p : edge_p_) {
          std::uint64_t wait = 0;
          bool present = false, absent = false;
          while (!(present && absent)) {
            if (++wait > kMaxDrawsPerReplicate) {
              throw Error(ErrorCode::BudgetExceeded, "edge waiting time exceeded the draw cap");
            }
            (rng.bernoulli(p) ? present : absent) = true;
          }
          worst = std::max(worst, wait);
        }
        return worst;
      }
    }
    return draws;
  }

 private:
  struct SignTracker {
    explicit SignTracker(std::size_t k)
        : plus(word_count(k), 0), minus(word_count(k), 0), full(word_count(k), ~std::uint64_t{0}) {
      full.back() = last_word_mask(k);
    }
    void add(const std::vector<std::uint64_t>& words) {
      for (std::size_t w = 0; w < words.size(); ++w) {
        plus[w] |= words[w];
        minus[w] |= ~words[w] & full[w];
      }
    }
    bool done() const {
      for (std::size_t w = 0; w < full.size(); ++w) {
        if ((plus[w] & minus[w]) != full[w]) return false;
      }
      return true;
    }
    std::vector<std::uint64_t> plus, minus, full;
  };

  struct ParityTracker {
    explicit ParityTracker(std::size_t states) : seen(states, 0), half(states / 2) {}
    void add(std::size_t x) {
      if (seen[x]) return;
      seen[x] = 1;
      ++(cube_is_even(x) ? even : odd);
    }
    bool done() const { return even == half || odd == half; }
    std::vector<char> seen;
    std::size_t half, even = 0, odd = 0;
  };

  std::size_t draw_state(RandomStream& rng) const {
    return k_ > 0 ? draw_cube_index(k_, rng) : static_cast<std::size_t>(rng.below(states_));
  }

  Criterion criterion_ = Criterion::Coverage;
  std::size_t states_ = 0;
  std::size_t k_ = 0;  // cube dimension; 0 for the full and graph families
  std::vector<double> edge_p_;
  std::optional<LinearSpan> span_;
  UniquenessOptions lp_;
};

struct Accumulator {
  std::uint64_t count = 0;
  unsigned __int128 sum = 0;
  unsigned __int128 sum_squares = 0;

  void add(std::uint64_t v) {
    ++count;
    sum += v;
    sum_squares += static_cast<unsigned __int128>(v) * v;
  }
  void merge(const Accumulator& o) {
    count += o.count;
    sum += o.sum;
    sum_squares += o.sum_squares;
  }
};

// Runs replicates 0..R-1 with contiguous chunks per thread. The integer
// accumulator makes the result independent of the split.
template <class PerReplicate>
Accumulator run_replicates(const ExperimentConfig& cfg, PerReplicate&& body) {
  if (cfg.replicates < 1) throw Error(ErrorCode::InvalidArgument, "need replicates >= 1");
  const std::uint64_t threads =
      std::clamp<std::uint64_t>(cfg.threads == 0 ? 1 : cfg.threads, 1, cfg.replicates);
  std::vector<Accumulator> parts(threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](std::uint64_t t) {
    try {
      const std::uint64_t begin = cfg.replicates * t / threads;
      const std::uint64_t end = cfg.replicates * (t + 1) / threads;
      for (std::uint64_t i = begin; i < end; ++i) {
        RandomStream rng(cfg.seed, i);
        parts[t].add(body(rng));
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  Accumulator total;
  for (std::uint64_t t = 0; t < threads; ++t) {
    if (errors[t]) std::rethrow_exception(errors[t]);
    total.merge(parts[t]);
  }
  return total;
}

void attach_reference(ExperimentSummary& s, std::optional<double> reference,
                      bool binomial) {
  s.reference = reference;
  if (!reference) return;
  double scale = s.std_error;
  if (scale == 0.0 && binomial) {
    scale = std::sqrt(*reference * (1.0 - *reference) / static_cast<double>(s.replicates));
  }
  const double diff = s.estimate - *reference;
  if (scale > 0.0) {
    s.z = diff / scale;
  } else {
    s.z = std::abs(diff) < 1e-12 ? 0.0 : std::copysign(HUGE_VAL, diff);
  }
}

ExperimentSummary proportion(const Accumulator& acc) {
  ExperimentSummary s;
  s.replicates = acc.count;
  const double r = static_cast<double>(acc.count);
  s.estimate = static_cast<double>(acc.sum) / r;
  s.std_error = std::sqrt(s.estimate * (1.0 - s.estimate) / r);
  return s;
}

// P(d distinct states after m uniform draws from K), for m = 0..n.
std::vector<double> coverage_curve(std::size_t states, std::size_t n) {
  std::vector<double> curve(n + 1, 0.0);
  std::vector<double> dist(states + 1, 0.0);
  dist[0] = 1.0;
  const double k = static_cast<double>(states);
  curve[0] = states == 0 ? 1.0 : 0.0;
  for (std::size_t m = 1; m <= n; ++m) {
    const std::size_t top = std::min(m, states);
    for (std::size_t d = top; d >= 1; --d) {
      dist[d] = dist[d] * (static_cast<double>(d) / k) +
                dist[d - 1] * (static_cast<double>(states - d + 1) / k);
    }
    dist[0] = 0.0;
    curve[m] = dist[states];
  }
  return curve;
}

double parity_existence(std::size_t k, std::size_t n) {
  const std::size_t half = std::size_t{1} << (k - 1);
  const std::vector<double> half_cover = coverage_curve(half, n);
  // P(E covered) = sum_m Binom(n, m; 1/2) P(m draws cover half the states); same for O.
  double one_class = 0.0;
  const double ln_half = -std::log(2.0) * static_cast<double>(n);
  const double ln_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t m = half; m <= n; ++m) {
    const double ln_binom = ln_n1 - std::lgamma(static_cast<double>(m) + 1.0) -
                            std::lgamma(static_cast<double>(n - m) + 1.0);
    one_class += std::exp(ln_binom + ln_half) * half_cover[m];
  }
  return 2.0 * one_class - coverage_probability(std::size_t{1} << k, n);
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Full: return "full";
    case FamilyKind::Rademacher: return "rademacher";
    case FamilyKind::Walsh: return "walsh";
    case FamilyKind::Graph: return "graph";
  }
  return "unknown";
}

std::vector<std::uint64_t> draw_cube_words(std::size_t k, RandomStream& rng) {
  std::vector<std::uint64_t> words(word_count(k));
  for (auto& w : words) w = rng();
  if (!words.empty()) words.back() &= last_word_mask(k);
  return words;
}

std::uint64_t simulate_nu(const FamilySpec& family, RandomStream& rng,
                          const UniquenessOptions& lp) {
  return Simulator(family, lp).nu(rng);
}

bool simulate_exists(const FamilySpec& family, std::size_t n, RandomStream& rng,
                     const UniquenessOptions& lp) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  return Simulator(family, lp).exists(n, rng);
}

ExperimentSummary estimate_existence_probability(const ExperimentConfig& cfg) {
  if (cfg.n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  const Simulator sim(cfg.family, cfg.lp);
  const Accumulator acc = run_replicates(
      cfg, [&](RandomStream& rng) -> std::uint64_t { return sim.exists(cfg.n, rng) ? 1 : 0; });
  ExperimentSummary s = proportion(acc);
  attach_reference(s, exact_existence_probability(cfg.family, cfg.n), true);
  return s;
}

ExperimentSummary estimate_nu_uniq(const ExperimentConfig& cfg) {
  const Simulator sim(cfg.family, cfg.lp);
  if (cfg.estimator == Estimator::NuTail) {
    const double t = cfg.tail_t;
    if (!std::isfinite(t)) throw Error(ErrorCode::NonFiniteInput, "tail threshold t");
    const Accumulator acc = run_replicates(cfg, [&](RandomStream& rng) -> std::uint64_t {
      return static_cast<double>(sim.nu(rng)) < t ? 1 : 0;
    });
    ExperimentSummary s = proportion(acc);
    std::optional<double> ref;
    if (t <= 1.0) {
      ref = 0.0;
    } else {
      ref = exact_nu_cdf(cfg.family, static_cast<std::size_t>(std::ceil(t)) - 1);
    }
    attach_reference(s, ref, true);
    return s;
  }

  const Accumulator acc = run_replicates(cfg, [&](RandomStream& rng) { return sim.nu(rng); });
  ExperimentSummary s;
  s.replicates = acc.count;
  const double r = static_cast<double>(acc.count);
  const double mean = static_cast<double>(acc.sum) / r;
  s.estimate = mean;
  if (acc.count > 1) {
    // sum (v - mean)^2 = sum v^2 - (sum v)^2 / R, formed in long double.
    const long double sum = static_cast<long double>(acc.sum);
    const long double ss = static_cast<long double>(acc.sum_squares) - sum * sum / r;
    const double variance = std::max(0.0, static_cast<double>(ss / (r - 1.0)));
    s.std_error = std::sqrt(variance / r);
  }
  attach_reference(s, exact_nu_mean(cfg.family), false);
  return s;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  return cfg.estimator == Estimator::Existence ? estimate_existence_probability(cfg)
                                               : estimate_nu_uniq(cfg);
}

double threshold_base_value(ThresholdBase base, std::size_t size) {
  if (size < 1) throw Error(ErrorCode::InvalidArgument, "threshold base needs size >= 1");
  const double s = static_cast<double>(size);
  switch (base) {
    case ThresholdBase::KLogK: return s * std::log(s);
    case ThresholdBase::Log2K: return std::log2(s);
    case ThresholdBase::K2kLog2: return s * std::exp2(s) * std::log(2.0);
    case ThresholdBase::K2k: return s * std::exp2(s);
    case ThresholdBase::LogN: return std::log(s);
  }
  return 0.0;
}

std::vector<SweepRow> threshold_sweep(const ExperimentConfig& cfg,
                                      std::span<const double> multipliers,
                                      ThresholdBase base) {
  const double b = threshold_base_value(base, cfg.family.size);
  std::vector<SweepRow> rows;
  for (double m : multipliers) {
    if (!std::isfinite(m) || m <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, "multipliers must be positive");
    }
    ExperimentConfig point = cfg;
    point.estimator = Estimator::Existence;
    point.n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(m * b)));
    rows.push_back(SweepRow{m, point.n, estimate_existence_probability(point)});
  }
  return rows;
}

double coverage_probability(std::size_t states, std::size_t n) {
  if (n < states) return 0.0;
  return coverage_curve(states, n)[n];
}

std::optional<double> exact_existence_probability(const FamilySpec& family, std::size_t n) {
  if (n < 1) return 0.0;
  switch (family.kind) {
    case FamilyKind::Full:
      return coverage_probability(family.size, n);
    case FamilyKind::Rademacher:
      return exists_probability_rademacher(static_cast<int>(family.size), static_cast<int>(n))
          .exact;
    case FamilyKind::Walsh: {
      const std::size_t k = family.size;
      const auto q = static_cast<std::size_t>(family.q);
      if (q == 1 && k != 1) {
        return exists_probability_rademacher(static_cast<int>(k), static_cast<int>(n)).exact;
      }
      if (k > kMaxIndexedCube) return std::nullopt;
      if (q == k) return coverage_probability(std::size_t{1} << k, n);
      if (q + 1 == k) return parity_existence(k, n);
      return std::nullopt;
    }
    case FamilyKind::Graph: {
      GraphParams params{family.c};
      if (params.c.empty()) params = GraphParams::zeros(family.size);
      return exists_probability_graphs(static_cast<int>(n), params);
    }
  }
  return std::nullopt;
}

std::optional<double> exact_nu_cdf(const FamilySpec& family, std::size_t m) {
  if (m == 0) return 0.0;
  return exact_existence_probability(family, m);
}

std::optional<double> exact_nu_mean(const FamilySpec& family) {
  const bool coverage = family.kind == FamilyKind::Full ||
                        (family.kind == FamilyKind::Walsh &&
                         static_cast<std::size_t>(family.q) == family.size &&
                         family.size <= kMaxIndexedCube);
  if (coverage) {
    const std::size_t states =
        family.kind == FamilyKind::Full ? family.size : std::size_t{1} << family.size;
    double h = 0.0;
    for (std::size_t i = states; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return static_cast<double>(states) * h;
  }
  const bool tail_sum = family.kind == FamilyKind::Rademacher ||
                        family.kind == FamilyKind::Graph ||
                        (family.kind == FamilyKind::Walsh && family.q == 1);
  if (!tail_sum) return std::nullopt;
  // E(nu) = sum_{m >= 0} P(nu > m).
  double total = 0.0;
  for (std::size_t m = 0; m < kMaxDrawsPerReplicate; ++m) {
    const double tail = 1.0 - *exact_nu_cdf(family, m);
    total += tail;
    if (m > 0 && tail < 1e-17) break;
  }
  return total;
}

}  // namespace mlexist
