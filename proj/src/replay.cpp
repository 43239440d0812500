#include "famrl/replay.hpp"

#include <algorithm>
#include <cmath>

#include "famrl/errors.hpp"

namespace famrl {

double sequence_priority(std::span<const double> td, std::size_t valid_length, double eta) {
  const std::vector<double> one(td.begin(), td.end());
  return sequence_priority(std::span<const std::vector<double>>(&one, 1), valid_length, eta);
}

double sequence_priority(std::span<const std::vector<double>> td_sets, std::size_t valid_length, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("priority exponent must lie in [0, 1]");
  if (valid_length == 0) throw InvalidArgument("sequence_priority: no valid step");
  double max_abs = 0.0;
  double sum_abs = 0.0;
  std::size_t n = 0;
  for (const auto& td : td_sets) {
    if (td.size() < valid_length) throw DimensionError("sequence_priority: fewer TD errors than valid steps");
    for (std::size_t s = 0; s < valid_length; ++s) {
      const double a = std::abs(td[s]);
      max_abs = std::max(max_abs, a);
      sum_abs += a;
      ++n;
    }
  }
  if (n == 0) throw InvalidArgument("sequence_priority: no valid step");
  return eta * max_abs + (1.0 - eta) * (sum_abs / static_cast<double>(n));
}

SumTree::SumTree(std::size_t leaves) : leaves_(leaves) {
  if (leaves == 0) throw InvalidArgument("sum tree needs at least one leaf");
  base_ = 1;
  while (base_ < leaves) base_ <<= 1;
  nodes_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t leaf, double value) {
  if (leaf >= leaves_) throw InvalidArgument("sum tree leaf out of range");
  if (!(value >= 0.0) || !std::isfinite(value)) throw InvalidArgument("priorities must be finite and non-negative");
  std::size_t i = base_ + leaf;
  nodes_[i] = value;
  for (i >>= 1; i >= 1; i >>= 1) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
}

std::size_t SumTree::find(double u) const {
  std::size_t i = 1;
  while (i < base_) {
    const std::size_t left = 2 * i;
    // Rounding can leave u just above the left mass; fall back to a non-empty side.
    if ((u < nodes_[left] && nodes_[left] > 0.0) || nodes_[left + 1] <= 0.0) {
      i = left;
    } else {
      u -= nodes_[left];
      i = left + 1;
    }
  }
  return i - base_;
}

SequenceReplay::SequenceReplay(ReplayConfig config) : config_(config), tree_(std::max<std::size_t>(config.capacity, 1)) {
  if (config_.capacity == 0) throw InvalidArgument("replay capacity must be positive");
  if (!(config_.priority_exponent >= 0.0 && config_.priority_exponent <= 1.0))
    throw InvalidArgument("priority exponent must lie in [0, 1]");
  slots_.resize(config_.capacity);
  slot_ids_.assign(config_.capacity, 0);
}

SequenceId SequenceReplay::insert(TransitionSequence seq, double priority) {
  validate_sequence(seq);
  const SequenceId id = next_id_++;
  const std::size_t slot = static_cast<std::size_t>(id % config_.capacity);
  slots_[slot] = std::move(seq);
  slot_ids_[slot] = id;
  tree_.set(slot, priority);
  size_ = std::min(size_ + 1, config_.capacity);
  return id;
}

bool SequenceReplay::contains(SequenceId id) const {
  return id < next_id_ && next_id_ - id <= config_.capacity;
}

std::optional<double> SequenceReplay::priority(SequenceId id) const {
  if (!contains(id)) return std::nullopt;
  return tree_.get(static_cast<std::size_t>(id % config_.capacity));
}

const TransitionSequence* SequenceReplay::get(SequenceId id) const {
  return contains(id) ? &slots_[static_cast<std::size_t>(id % config_.capacity)] : nullptr;
}

std::optional<ReplayBatch> SequenceReplay::sample(std::size_t batch_size, Rng& rng) const {
  if (!ready()) return std::nullopt;
  ReplayBatch batch;
  batch.ids.reserve(batch_size);
  batch.sequences.reserve(batch_size);
  const double total = tree_.total();
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::size_t slot = tree_.find(uniform01(rng) * total);
    batch.ids.push_back(slot_ids_[slot]);
    batch.sequences.push_back(slots_[slot]);
  }
  return batch;
}

void SequenceReplay::update_priorities(std::span<const SequenceId> ids, std::span<const double> priorities) {
  if (ids.size() != priorities.size()) throw DimensionError("update_priorities: size mismatch");
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (contains(ids[i])) tree_.set(static_cast<std::size_t>(ids[i] % config_.capacity), priorities[i]);
}

}  // namespace famrl
