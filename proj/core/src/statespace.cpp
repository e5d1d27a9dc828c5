#include "mlexist/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "mlexist/error.hpp"

namespace mlexist {

// --- IndexSet ---------------------------------------------------------------

IndexSet::IndexSet(std::initializer_list<std::size_t> indices)
    : IndexSet(from_unsorted(std::vector<std::size_t>(indices))) {}

IndexSet IndexSet::from_unsorted(std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  IndexSet out;
  out.items_ = std::move(indices);
  return out;
}

IndexSet IndexSet::all(std::size_t count) {
  IndexSet out;
  out.items_.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.items_[i] = i;
  return out;
}

bool IndexSet::contains(std::size_t index) const {
  return std::binary_search(items_.begin(), items_.end(), index);
}

bool IndexSet::includes(const IndexSet& other) const {
  return std::includes(items_.begin(), items_.end(), other.items_.begin(),
                       other.items_.end());
}

IndexSet IndexSet::complement(std::size_t universe) const {
  IndexSet out;
  auto it = items_.begin();
  for (std::size_t i = 0; i < universe; ++i) {
    if (it != items_.end() && *it == i) {
      ++it;
    } else {
      out.items_.push_back(i);
    }
  }
  return out;
}

IndexSet IndexSet::united(const IndexSet& other) const {
  IndexSet out;
  std::set_union(items_.begin(), items_.end(), other.items_.begin(),
                 other.items_.end(), std::back_inserter(out.items_));
  return out;
}

// --- StateSpace -------------------------------------------------------------

StateSpace::StateSpace(std::vector<std::string> labels,
                       std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (labels_.empty()) throw Error(ErrorCode::EmptySpace, "no states given");
  if (labels_.size() != weights_.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(labels_.size()) + " labels but " +
                    std::to_string(weights_.size()) + " weights");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0) {
      throw Error(ErrorCode::NonPositiveWeight,
                  "weight of state '" + labels_[i] + "' must be finite and > 0");
    }
  }
  by_label_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!by_label_.emplace(labels_[i], i).second) {
      throw Error(ErrorCode::DuplicateLabel, "label '" + labels_[i] + "'");
    }
  }
}

const std::string& StateSpace::label(std::size_t index) const {
  if (index >= labels_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, std::to_string(index));
  }
  return labels_[index];
}

std::size_t StateSpace::index_of(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) throw Error(ErrorCode::UnknownLabel, label);
  return it->second;
}

bool StateSpace::has_label(const std::string& label) const {
  return by_label_.contains(label);
}

double StateSpace::total_weight() const noexcept {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

double StateSpace::min_log_weight() const noexcept {
  return std::log(*std::min_element(weights_.begin(), weights_.end()));
}

StateSpace StateSpace::restricted(const IndexSet& states) const {
  std::vector<std::string> labels;
  std::vector<double> weights;
  labels.reserve(states.size());
  weights.reserve(states.size());
  for (std::size_t i : states) {
    labels.push_back(label(i));
    weights.push_back(weights_[i]);
  }
  return StateSpace(std::move(labels), std::move(weights));
}

StateSpace build_space(std::vector<std::string> labels,
                       std::vector<double> weights) {
  return StateSpace(std::move(labels), std::move(weights));
}

// --- Sample -----------------------------------------------------------------

Sample::Sample(const StateSpace& space, std::vector<std::size_t> indices)
    : Sample(space.size(), std::move(indices)) {}

Sample::Sample(std::size_t state_count, std::vector<std::size_t> indices)
    : state_count_(state_count), indices_(std::move(indices)) {
  if (indices_.empty()) throw Error(ErrorCode::EmptySample, "n must be >= 1");
  for (std::size_t i : indices_) {
    if (i >= state_count_) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "sample index " + std::to_string(i) + " with K=" +
                      std::to_string(state_count_));
    }
  }
}

IndexSet sample_support(const Sample& sample) {
  return IndexSet::from_unsorted(
      std::vector<std::size_t>(sample.indices().begin(), sample.indices().end()));
}

}  // namespace mlexist
