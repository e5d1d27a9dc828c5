#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mlexist {

/// Sorted, duplicate-free set of state indices.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> indices);

  /// Sorts and deduplicates.
  static IndexSet from_unsorted(std::vector<std::size_t> indices);
  static IndexSet all(std::size_t count);

  bool contains(std::size_t index) const;
  bool includes(const IndexSet& other) const;
  IndexSet complement(std::size_t universe) const;
  IndexSet united(const IndexSet& other) const;

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::size_t front() const { return items_.front(); }
  std::size_t back() const { return items_.back(); }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }
  const std::vector<std::size_t>& items() const noexcept { return items_; }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> items_;
};

/// Finite state space with a strictly positive weight per state. States are
/// addressed by dense index 0..K-1; labels only matter for I/O.
class StateSpace {
 public:
  StateSpace(std::vector<std::string> labels, std::vector<double> weights);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t index) const;
  std::size_t index_of(const std::string& label) const;
  bool has_label(const std::string& label) const;

  double weight(std::size_t index) const { return weights_.at(index); }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const std::string> labels() const noexcept { return labels_; }

  double total_weight() const noexcept;
  double min_log_weight() const noexcept;

  /// Sub-space on the given states; weights are copied, not renormalized.
  StateSpace restricted(const IndexSet& states) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
  std::unordered_map<std::string, std::size_t> by_label_;
};

StateSpace build_space(std::vector<std::string> labels,
                       std::vector<double> weights);

/// Observed sequence x_1..x_n of state indices (n >= 1).
class Sample {
 public:
  Sample(const StateSpace& space, std::vector<std::size_t> indices);
  Sample(std::size_t state_count, std::vector<std::size_t> indices);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t state_count() const noexcept { return state_count_; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }

 private:
  std::size_t state_count_;
  std::vector<std::size_t> indices_;
};

/// The set {x_1,...,x_n}; independent of order and repetition.
IndexSet sample_support(const Sample& sample);

}  // namespace mlexist
