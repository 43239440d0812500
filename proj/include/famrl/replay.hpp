#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "famrl/rng.hpp"
#include "famrl/sequence.hpp"

namespace famrl {

/// eta * max|td| + (1 - eta) * mean|td| over the first `valid_length` entries.
/// Throws InvalidArgument when no entry is valid.
double sequence_priority(std::span<const double> td, std::size_t valid_length, double eta = 0.9);

/// Same mixture over the union of several TD-error vectors (e.g. the
/// extrinsic and intrinsic errors of one sequence).
double sequence_priority(std::span<const std::vector<double>> td_sets, std::size_t valid_length, double eta = 0.9);

/// Binary sum tree over a fixed number of leaves. Parent sums are recomputed
/// from their children on every write, so they never accumulate drift.
class SumTree {
 public:
  explicit SumTree(std::size_t leaves);

  void set(std::size_t leaf, double value);
  double get(std::size_t leaf) const { return nodes_[base_ + leaf]; }
  double total() const { return nodes_[1]; }
  std::size_t leaves() const noexcept { return leaves_; }
  /// Leaf whose cumulative range contains u, for 0 <= u < total(). Leaves of
  /// zero mass are never returned.
  std::size_t find(double u) const;

 private:
  std::size_t leaves_;
  std::size_t base_;
  std::vector<double> nodes_;
};

struct ReplayConfig {
  std::size_t capacity = 50'000;
  std::size_t min_to_start = 64;
  double priority_exponent = 0.9;
};

using SequenceId = std::uint64_t;

struct ReplayBatch {
  std::vector<SequenceId> ids;
  std::vector<TransitionSequence> sequences;
};

/// FIFO ring of transition sequences with proportional prioritised sampling.
class SequenceReplay {
 public:
  explicit SequenceReplay(ReplayConfig config = {});

  /// Validates the sequence (SchemaViolation) and stores it, evicting the
  /// oldest one when full. Ids increase by one per insert.
  SequenceId insert(TransitionSequence seq, double priority);

  bool ready() const noexcept { return size_ >= config_.min_to_start && tree_.total() > 0.0; }
  /// Samples with replacement, probability proportional to priority.
  /// Returns nullopt until ready().
  std::optional<ReplayBatch> sample(std::size_t batch_size, Rng& rng) const;

  /// Ids that were evicted in the meantime are ignored.
  void update_priorities(std::span<const SequenceId> ids, std::span<const double> priorities);

  bool contains(SequenceId id) const;
  std::optional<double> priority(SequenceId id) const;
  const TransitionSequence* get(SequenceId id) const;

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return config_.capacity; }
  std::uint64_t inserted() const noexcept { return next_id_; }
  double fill_ratio() const noexcept { return static_cast<double>(size_) / static_cast<double>(config_.capacity); }
  const ReplayConfig& config() const noexcept { return config_; }

 private:
  ReplayConfig config_;
  SumTree tree_;
  std::vector<TransitionSequence> slots_;
  std::vector<SequenceId> slot_ids_;
  std::size_t size_ = 0;
  SequenceId next_id_ = 0;
};

}  // namespace famrl
