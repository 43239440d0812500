#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "famrl/family.hpp"
#include "famrl/replay.hpp"
#include "famrl/tables.hpp"

namespace famrl {

enum class OptimizerKind { sgd, adam };

struct LearnerConfig {
  std::size_t batch_size = 64;
  OptimizerKind optimizer = OptimizerKind::sgd;
  /// SGD step on half the squared error, averaged over repeated entries in a batch.
  double learning_rate = 0.5;
  double adam_learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-4;
  std::size_t target_update_period = 1500;
  double priority_exponent = 0.9;
  double divergence_bound = 1e9;
  double init_value = 0.0;
};

struct LearnerUpdate {
  double loss_extrinsic = 0.0;
  double loss_intrinsic = 0.0;
  /// One per batch element, from the TD errors of the updated online tables.
  std::vector<double> priorities;
  bool target_refreshed = false;
};

/// Online and target tables per family index plus the optimiser state.
class Learner {
 public:
  Learner(LearnerConfig config, ValueConfig values, PolicyFamily family, std::size_t states, std::size_t actions);

  /// One optimiser step on each online table from the given batch. Targets use
  /// the target tables only, with the target policy greedy on their mix.
  /// Throws DivergenceError when a table leaves the bound.
  LearnerUpdate update(std::span<const TransitionSequence> batch);

  /// Samples a batch, updates, and writes the new priorities back.
  /// Returns nullopt while the replay is not ready.
  std::optional<LearnerUpdate> step(SequenceReplay& replay, Rng& rng);

  const ValueTables& online() const noexcept { return online_; }
  const ValueTables& target() const noexcept { return target_; }
  ValueTables& mutable_online() noexcept { return online_; }
  /// Copies online into target tables.
  void refresh_target() { target_ = online_; }

  /// Immutable copy of the online tables, cached until the next update.
  std::shared_ptr<const ValueTables> snapshot() const;

  std::uint64_t updates() const noexcept { return updates_; }
  const LearnerConfig& config() const noexcept { return config_; }
  const ValueConfig& value_config() const noexcept { return values_; }
  const PolicyFamily& family() const noexcept { return family_; }

 private:
  LearnerConfig config_;
  ValueConfig values_;
  PolicyFamily family_;
  ValueTables online_;
  ValueTables target_;
  ValueTables adam_m_;
  ValueTables adam_v_;
  // Gradient scratch reused across updates; entries listed in touched_ are non-zero.
  ValueTables grad_sum_;
  std::vector<std::uint32_t> grad_count_;
  std::vector<std::size_t> touched_;
  std::uint64_t updates_ = 0;
  mutable std::shared_ptr<const ValueTables> snapshot_;
  mutable std::uint64_t snapshot_version_ = UINT64_MAX;
};

}  // namespace famrl
