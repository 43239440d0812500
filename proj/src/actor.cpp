#include "famrl/actor.hpp"

#include <cmath>
#include <exception>

#include "famrl/errors.hpp"
#include "famrl/replay.hpp"
#include "famrl/retrace.hpp"

namespace famrl {

double actor_epsilon(std::size_t l, std::size_t num_actors, double base_eps, double alpha) {
  if (num_actors == 0) throw InvalidArgument("actor_epsilon: no actors");
  if (l >= num_actors) throw InvalidArgument("actor_epsilon: actor index out of range");
  if (!(base_eps > 0.0 && base_eps <= 1.0)) throw InvalidArgument("actor_epsilon: base epsilon outside ]0, 1]");
  if (num_actors == 1) return base_eps;
  const double exponent = 1.0 + alpha * static_cast<double>(l) / static_cast<double>(num_actors - 1);
  return std::pow(base_eps, exponent);
}

double behavior_probability(bool is_greedy_action, double eps, std::size_t action_count) {
  if (action_count == 0) throw InvalidArgument("behavior_probability: no actions");
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("behavior_probability: eps outside [0, 1]");
  const double n = static_cast<double>(action_count);
  return is_greedy_action ? 1.0 - eps * (n - 1.0) / n : eps / n;
}

std::vector<std::size_t> sequence_starts(std::size_t episode_length, std::size_t trace_length,
                                         std::size_t replay_period) {
  if (replay_period >= trace_length) throw ConfigError("replay period must be shorter than the trace length");
  const std::size_t stride = trace_length - replay_period;
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s < episode_length; s += stride) {
    if (s != 0 && s + replay_period >= episode_length) break;
    starts.push_back(s);
    if (s + trace_length >= episode_length) break;
  }
  return starts;
}

Actor::Actor(ActorConfig config, std::unique_ptr<Environment> env, std::shared_ptr<const PolicyFamily> family,
             ValueConfig values, BanditConfig bandit, NoveltyConfig novelty, SnapshotSource source,
             std::uint64_t seed)
    : config_(config),
      env_(std::move(env)),
      family_(std::move(family)),
      values_(values),
      loss_t_(values.loss_transform()),
      mix_t_(values.mix_transform()),
      bandit_(bandit),
      memory_(novelty.episodic),
      lifelong_(novelty.lifelong),
      reward_cfg_(novelty.reward),
      novelty_enabled_(novelty.enabled),
      source_(std::move(source)),
      rng_(make_rng(seed, 1000 + config.index)),
      eps_(actor_epsilon(config.index, config.num_actors, config.base_eps, config.ladder_alpha)) {
  if (!env_ || !family_ || !source_) throw InvalidArgument("actor needs an environment, a family and a table source");
  if (bandit.num_arms != family_->size()) throw ConfigError("bandit arms must match the family size");
  if (config_.replay_period >= config_.trace_length) throw ConfigError("replay period must be shorter than the trace length");
  if (config_.refresh_period == 0) throw ConfigError("actor refresh period must be positive");
}

void Actor::refresh() {
  tables_ = source_();
  if (!tables_) throw InternalError("table source returned nothing");
  if (tables_->family_size() != family_->size() || tables_->num_states() != env_->num_states() ||
      tables_->num_actions() != env_->num_actions())
    throw DimensionError("actor tables do not match the environment and family");
}

void Actor::begin_episode() {
  arm_ = bandit_.select_arm(rng_);
  state_ = env_->reset(rng_);
  memory_.reset();
  const auto emb = env_->embedding();
  memory_.add(emb);
  buffer_.clear();
  return_e_ = 0.0;
  return_i_ = 0.0;
  in_episode_ = true;
}

double Actor::initial_priority(const TransitionSequence& seq) const {
  const std::size_t j = seq.family_index;
  const TraceConfig trace{values_.retrace_lambda, family_->gamma(j)};
  const GreedyMixPolicy pi(tables_->extrinsic[j], tables_->intrinsic[j], family_->beta(j), mix_t_);
  std::vector<double> td[2];
  const auto te = sequence_targets(seq, tables_->extrinsic[j], pi, trace, loss_t_, RewardSelect::extrinsic());
  const auto ti = sequence_targets(seq, tables_->intrinsic[j], pi, trace, loss_t_, RewardSelect::intrinsic());
  td[0].resize(seq.valid_length);
  td[1].resize(seq.valid_length);
  for (std::size_t s = 0; s < seq.valid_length; ++s) {
    const Transition& t = seq.steps[s];
    td[0][s] = te.target[s] - tables_->extrinsic[j](t.observation, t.action);
    td[1][s] = ti.target[s] - tables_->intrinsic[j](t.observation, t.action);
  }
  return sequence_priority(std::span<const std::vector<double>>(td, 2), seq.valid_length, config_.priority_exponent);
}

PrioritizedSequence Actor::make_sequence(std::size_t start) const {
  PrioritizedSequence out;
  TransitionSequence& seq = out.sequence;
  seq.family_index = arm_;
  seq.actor = config_.index;
  seq.episode = episode_id_;
  seq.start = start;
  const std::size_t end = std::min(buffer_.size(), start + config_.trace_length);
  seq.steps.assign(buffer_.begin() + static_cast<std::ptrdiff_t>(start),
                   buffer_.begin() + static_cast<std::ptrdiff_t>(end));
  seq.valid_length = seq.steps.size();
  Transition pad;
  pad.family_index = arm_;
  seq.steps.resize(config_.trace_length, pad);
  out.priority = initial_priority(seq);
  return out;
}

ActorStep Actor::step() {
  ActorStep out;
  if (!tables_ || frames_ % config_.refresh_period == 0) refresh();
  if (!in_episode_) begin_episode();

  const std::size_t A = env_->num_actions();
  const std::size_t j = arm_;
  const std::size_t greedy = greedy_mix_action(*tables_, j, family_->beta(j), state_, mix_t_);
  const bool explore = uniform01(rng_) < eps_;
  const std::size_t action = explore ? static_cast<std::size_t>(uniform_index(rng_, A)) : greedy;

  EnvStep result;
  try {
    result = env_->step(action, rng_);
  } catch (const std::exception&) {
    // Faulty episode: nothing from it reaches replay or the bandit.
    EpisodeRecord rec{config_.index, episode_id_, arm_, return_e_, return_i_, buffer_.size(), true};
    ++episode_id_;
    in_episode_ = false;
    buffer_.clear();
    out.episode = rec;
    return out;
  }
  ++frames_;

  double r_i = 0.0;
  if (novelty_enabled_) {
    const auto emb = env_->embedding();
    const double r_episodic = memory_.novelty(emb);
    const double alpha = lifelong_.alpha(emb);
    r_i = intrinsic_reward(r_episodic, alpha, reward_cfg_);
  }

  Transition t;
  if (!buffer_.empty()) {
    const Transition& prev = buffer_.back();
    t.prev_extrinsic_reward = prev.extrinsic_reward;
    t.prev_intrinsic_reward = prev.intrinsic_reward;
    t.prev_action = prev.action;
  }
  t.observation = state_;
  t.action = action;
  t.behavior_prob = behavior_probability(action == greedy, eps_, A);
  t.family_index = j;
  t.extrinsic_reward = result.reward;
  t.intrinsic_reward = r_i;
  t.next_observation = result.state;
  t.terminal = result.terminal;
  buffer_.push_back(t);
  return_e_ += result.reward;
  return_i_ += r_i;
  state_ = result.state;

  if (result.done) {
    const std::size_t T = buffer_.size();
    // Sequences leave the actor only once the episode is complete.
    for (std::size_t start : sequence_starts(T, config_.trace_length, config_.replay_period))
      out.sequences.push_back(make_sequence(start));
    bandit_.update(arm_, return_e_);
    out.episode = EpisodeRecord{config_.index, episode_id_, arm_, return_e_, return_i_, T, false};
    ++episode_id_;
    in_episode_ = false;
  }
  return out;
}

EpisodeRun Actor::run_episode() {
  EpisodeRun run;
  for (;;) {
    ActorStep s = step();
    for (auto& seq : s.sequences) run.sequences.push_back(std::move(seq));
    if (s.episode) {
      run.record = *s.episode;
      return run;
    }
  }
}

}  // namespace famrl
