#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "famrl/actor.hpp"
#include "famrl/bandit.hpp"
#include "famrl/environments.hpp"
#include "famrl/evaluator.hpp"
#include "famrl/family.hpp"
#include "famrl/learner.hpp"
#include "famrl/novelty.hpp"
#include "famrl/replay.hpp"
#include "famrl/tables.hpp"

namespace famrl {

enum class EnvKind { random_coin, random_mdp };
enum class RunMode { single_process, multi_worker };

struct TrainConfig {
  std::uint64_t seed = 0;
  RunMode mode = RunMode::single_process;
  /// Environment steps summed over actors.
  std::uint64_t total_frames = 200'000;
  std::uint64_t metrics_interval = 1000;
  /// Actor steps between learner updates.
  std::size_t steps_per_learner_update = 4;
  /// Episodes per family member in the closing greedy evaluation (0 skips it).
  std::size_t final_eval_episodes = 50;

  EnvKind env = EnvKind::random_coin;
  CoinConfig coin;
  MdpGeneratorConfig mdp{10, 3, 0.5, 3, true, 1, 0};
  int mdp_max_steps = 100;

  FamilySchedule schedule;
  /// Overrides the schedule when non-empty.
  std::vector<FamilyMember> family_pairs;

  std::size_t num_actors = 8;
  double actor_base_eps = 0.4;
  double actor_eps_alpha = 8.0;
  std::size_t actor_refresh_period = 400;
  BanditConfig actor_bandit{1, 160, 0.5, 1.0};
  BanditConfig evaluator_bandit{1, 3600, 0.01, 1.0};

  bool evaluator = true;
  EvaluatorConfig evaluator_config;

  std::size_t trace_length = 80;
  std::size_t replay_period = 40;
  ReplayConfig replay;

  LearnerConfig learner;
  ValueConfig values;

  NoveltyConfig novelty;

  PolicyFamily family() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Parses "key = value" lines ('#' starts a comment). Keys are the snake_case
/// names written by write_config, or hyperparameter names in their long
/// spelling (e.g. "Retrace lambda", "Bandit window size"). Unknown keys and
/// malformed values throw ConfigError with the line number.
TrainConfig parse_config(std::istream& in, TrainConfig base = {});
TrainConfig load_config(const std::string& path, TrainConfig base = {});

/// Every setting, one per line, in a form parse_config reads back.
void write_config(std::ostream& out, const TrainConfig& config);

struct ConfigKeyInfo {
  std::string name;
  std::string key;  // empty when the setting is accepted but has no effect here
  std::string reference_value;
};

/// The long-form hyperparameter names accepted as aliases.
const std::vector<ConfigKeyInfo>& hyperparameter_aliases();

}  // namespace famrl
