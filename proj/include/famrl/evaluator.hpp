#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "famrl/actor.hpp"
#include "famrl/bandit.hpp"
#include "famrl/environments.hpp"
#include "famrl/family.hpp"
#include "famrl/tables.hpp"

namespace famrl {

enum class EvaluatorPhase { training, evaluation };

/// Phase of evaluator episode `episode`: blocks of `phase_length` episodes,
/// bandit training first.
EvaluatorPhase evaluator_phase(std::uint64_t episode, std::size_t phase_length = 5);

struct EvaluatorConfig {
  double eps = 0.01;
  std::size_t phase_length = 5;
  /// Episodes in the trailing mean of evaluation returns.
  std::size_t return_window = 50;
};

struct EvaluationRecord {
  std::uint64_t episode = 0;
  EvaluatorPhase phase = EvaluatorPhase::training;
  std::size_t arm = 0;
  double extrinsic_return = 0.0;
  std::size_t length = 0;
  /// Mean return of the evaluation block, on its last episode.
  std::optional<double> block_mean;
};

/// Alternates bandit-training and greedy-arm evaluation blocks. Its
/// experience is never stored; tables are refreshed at every block start.
class Evaluator {
 public:
  Evaluator(EvaluatorConfig config, std::unique_ptr<Environment> env, std::shared_ptr<const PolicyFamily> family,
            ValueConfig values, BanditConfig bandit, SnapshotSource source, std::uint64_t seed);

  /// One environment step; returns the record when an episode ends.
  std::optional<EvaluationRecord> step();
  EvaluationRecord run_episode();

  EvaluatorPhase phase() const noexcept { return evaluator_phase(episode_, config_.phase_length); }
  std::uint64_t episodes() const noexcept { return episode_; }
  const BanditState& bandit() const noexcept { return bandit_; }
  const std::vector<double>& evaluation_returns() const noexcept { return eval_returns_; }
  const std::vector<double>& block_means() const noexcept { return block_means_; }
  /// Trailing mean over the last `return_window` evaluation returns; NaN before any.
  double return_mean() const;
  std::size_t last_arm() const noexcept { return arm_; }

 private:
  EvaluatorConfig config_;
  std::unique_ptr<Environment> env_;
  std::shared_ptr<const PolicyFamily> family_;
  OptionalTransform mix_t_;
  BanditState bandit_;
  SnapshotSource source_;
  std::shared_ptr<const ValueTables> tables_;
  Rng rng_;

  bool in_episode_ = false;
  std::uint64_t episode_ = 0;
  std::size_t arm_ = 0;
  std::size_t state_ = 0;
  std::size_t length_ = 0;
  double return_ = 0.0;
  std::vector<double> eval_returns_;
  std::vector<double> block_means_;
  double block_sum_ = 0.0;
};

/// Mean extrinsic return of `episodes` eps-greedy episodes with family member j.
double evaluate_arm(Environment& env, const ValueTables& tables, const PolicyFamily& family, const ValueConfig& values,
                    std::size_t j, std::size_t episodes, double eps, Rng& rng);

}  // namespace famrl
