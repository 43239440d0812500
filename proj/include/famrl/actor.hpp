#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "famrl/bandit.hpp"
#include "famrl/environments.hpp"
#include "famrl/family.hpp"
#include "famrl/novelty.hpp"
#include "famrl/sequence.hpp"
#include "famrl/tables.hpp"

namespace famrl {

/// eps^(1 + alpha l / (L - 1)); eps itself when L == 1.
double actor_epsilon(std::size_t l, std::size_t num_actors, double base_eps = 0.4, double alpha = 8.0);

/// Stored behaviour probability of an eps-greedy step: eps / |A| when the
/// action came from the uniform draw, 1 - eps (|A| - 1) / |A| otherwise.
double behavior_probability(bool is_greedy_action, double eps, std::size_t action_count);

struct ActorConfig {
  std::size_t index = 0;
  std::size_t num_actors = 8;
  double base_eps = 0.4;
  double ladder_alpha = 8.0;
  std::size_t trace_length = 80;
  /// Steps shared by consecutive sequences of one episode.
  std::size_t replay_period = 40;
  /// Frames between table refreshes.
  std::size_t refresh_period = 400;
  double priority_exponent = 0.9;
};

struct PrioritizedSequence {
  TransitionSequence sequence;
  double priority = 0.0;
};

struct EpisodeRecord {
  std::size_t actor = 0;
  std::uint64_t episode = 0;
  std::size_t arm = 0;
  double extrinsic_return = 0.0;
  double intrinsic_return = 0.0;
  std::size_t length = 0;
  bool aborted = false;
};

struct ActorStep {
  std::vector<PrioritizedSequence> sequences;
  std::optional<EpisodeRecord> episode;  // set when an episode ended on this step
};

struct EpisodeRun {
  std::vector<PrioritizedSequence> sequences;
  EpisodeRecord record;
};

/// Supplies the current tables; called at refresh boundaries.
using SnapshotSource = std::function<std::shared_ptr<const ValueTables>()>;

/// Splits an episode of T steps into windows of `trace_length` starting every
/// trace_length - replay_period steps. The last window is zero-padded; a window
/// is dropped when every one of its steps is already covered by its predecessor.
std::vector<std::size_t> sequence_starts(std::size_t episode_length, std::size_t trace_length,
                                         std::size_t replay_period);

class Actor {
 public:
  Actor(ActorConfig config, std::unique_ptr<Environment> env, std::shared_ptr<const PolicyFamily> family,
        ValueConfig values, BanditConfig bandit, NoveltyConfig novelty, SnapshotSource source, std::uint64_t seed);

  /// One environment step (starting an episode first if needed).
  /// Sequences of an episode are emitted together on its last step.
  ActorStep step();
  /// Steps until the current or next episode ends.
  EpisodeRun run_episode();

  double epsilon() const noexcept { return eps_; }
  std::uint64_t frames() const noexcept { return frames_; }
  std::uint64_t episodes() const noexcept { return episode_id_; }
  bool in_episode() const noexcept { return in_episode_; }
  std::size_t current_arm() const noexcept { return arm_; }
  const BanditState& bandit() const noexcept { return bandit_; }
  const ActorConfig& config() const noexcept { return config_; }
  const ValueTables* tables() const noexcept { return tables_.get(); }
  /// Pulls a fresh snapshot now.
  void refresh();

 private:
  void begin_episode();
  PrioritizedSequence make_sequence(std::size_t start) const;
  double initial_priority(const TransitionSequence& seq) const;

  ActorConfig config_;
  std::unique_ptr<Environment> env_;
  std::shared_ptr<const PolicyFamily> family_;
  ValueConfig values_;
  OptionalTransform loss_t_;
  OptionalTransform mix_t_;
  BanditState bandit_;
  EpisodicMemory memory_;
  LifelongModulator lifelong_;
  IntrinsicRewardConfig reward_cfg_;
  bool novelty_enabled_;
  SnapshotSource source_;
  std::shared_ptr<const ValueTables> tables_;
  Rng rng_;
  double eps_;

  bool in_episode_ = false;
  std::uint64_t frames_ = 0;
  std::uint64_t episode_id_ = 0;
  std::size_t arm_ = 0;
  std::size_t state_ = 0;
  std::vector<Transition> buffer_;
  double return_e_ = 0.0;
  double return_i_ = 0.0;
};

}  // namespace famrl
