#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "famrl/actor.hpp"
#include "famrl/config.hpp"
#include "famrl/environments.hpp"
#include "famrl/evaluator.hpp"
#include "famrl/tables.hpp"

namespace famrl {

struct MetricsRow {
  std::uint64_t wall_step = 0;
  std::uint64_t frames = 0;
  double evaluator_return_mean50 = 0.0;  // NaN before the first evaluation episode
  std::size_t chosen_arm = 0;
  double loss_e = 0.0;
  double loss_i = 0.0;
  double replay_fill = 0.0;
};

struct TrainingResult {
  std::vector<MetricsRow> metrics;
  std::vector<EpisodeRecord> actor_episodes;
  std::vector<EvaluationRecord> evaluator_episodes;
  /// Closing greedy evaluation: mean extrinsic return per family member.
  std::vector<double> final_arm_returns;
  std::shared_ptr<const ValueTables> tables;
  std::uint64_t frames = 0;
  std::uint64_t learner_updates = 0;
  std::uint64_t sequences_inserted = 0;
};

/// Builds the configured environment.
std::unique_ptr<Environment> make_environment(const TrainConfig& config);

/// Runs actors, replay, learner and evaluator until the frame budget is spent.
/// Single-process mode is deterministic for a given config (including seed).
TrainingResult run_training(const TrainConfig& config);

/// Header wall_step,frames,evaluator_return_mean50,chosen_arm,loss_e,loss_i,replay_fill.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace famrl
