#include "famrl/evaluator.hpp"

#include <cmath>
#include <limits>

#include "famrl/errors.hpp"
#include "famrl/metrics.hpp"

namespace famrl {

EvaluatorPhase evaluator_phase(std::uint64_t episode, std::size_t phase_length) {
  if (phase_length == 0) throw InvalidArgument("evaluator phase length must be positive");
  return (episode / phase_length) % 2 == 0 ? EvaluatorPhase::training : EvaluatorPhase::evaluation;
}

Evaluator::Evaluator(EvaluatorConfig config, std::unique_ptr<Environment> env,
                     std::shared_ptr<const PolicyFamily> family, ValueConfig values, BanditConfig bandit,
                     SnapshotSource source, std::uint64_t seed)
    : config_(config),
      env_(std::move(env)),
      family_(std::move(family)),
      mix_t_(values.mix_transform()),
      bandit_(bandit),
      source_(std::move(source)),
      rng_(make_rng(seed, 7)) {
  if (!env_ || !family_ || !source_) throw InvalidArgument("evaluator needs an environment, a family and a table source");
  if (bandit.num_arms != family_->size()) throw ConfigError("bandit arms must match the family size");
  if (config_.phase_length == 0) throw ConfigError("evaluator phase length must be positive");
  if (!(config_.eps >= 0.0 && config_.eps <= 1.0)) throw ConfigError("evaluator eps must lie in [0, 1]");
}

std::optional<EvaluationRecord> Evaluator::step() {
  if (!in_episode_) {
    if (!tables_ || episode_ % config_.phase_length == 0) tables_ = source_();
    if (!tables_) throw InternalError("table source returned nothing");
    arm_ = phase() == EvaluatorPhase::training ? bandit_.select_arm(rng_) : bandit_.greedy_arm();
    state_ = env_->reset(rng_);
    length_ = 0;
    return_ = 0.0;
    in_episode_ = true;
  }
  const std::size_t A = env_->num_actions();
  const std::size_t greedy = greedy_mix_action(*tables_, arm_, family_->beta(arm_), state_, mix_t_);
  const bool explore = uniform01(rng_) < config_.eps;
  const std::size_t action = explore ? static_cast<std::size_t>(uniform_index(rng_, A)) : greedy;
  const EnvStep r = env_->step(action, rng_);
  state_ = r.state;
  return_ += r.reward;
  ++length_;
  if (!r.done) return std::nullopt;

  in_episode_ = false;
  EvaluationRecord rec{episode_, phase(), arm_, return_, length_, std::nullopt};
  if (rec.phase == EvaluatorPhase::training) {
    bandit_.update(arm_, return_);
  } else {
    eval_returns_.push_back(return_);
    block_sum_ += return_;
    if ((episode_ + 1) % config_.phase_length == 0) {
      rec.block_mean = block_sum_ / static_cast<double>(config_.phase_length);
      block_means_.push_back(*rec.block_mean);
      block_sum_ = 0.0;
    }
  }
  ++episode_;
  return rec;
}

EvaluationRecord Evaluator::run_episode() {
  for (;;)
    if (auto rec = step()) return *rec;
}

double Evaluator::return_mean() const {
  if (eval_returns_.empty()) return std::numeric_limits<double>::quiet_NaN();
  return windowed_mean(eval_returns_, config_.return_window).back();
}

double evaluate_arm(Environment& env, const ValueTables& tables, const PolicyFamily& family, const ValueConfig& values,
                    std::size_t j, std::size_t episodes, double eps, Rng& rng) {
  if (episodes == 0) throw InvalidArgument("evaluate_arm: no episodes");
  if (j >= family.size()) throw InvalidArgument("evaluate_arm: family index out of range");
  const OptionalTransform mix_t = values.mix_transform();
  const std::size_t A = env.num_actions();
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    std::size_t x = env.reset(rng);
    for (;;) {
      const std::size_t greedy = greedy_mix_action(tables, j, family.beta(j), x, mix_t);
      const std::size_t a = uniform01(rng) < eps ? static_cast<std::size_t>(uniform_index(rng, A)) : greedy;
      const EnvStep r = env.step(a, rng);
      total += r.reward;
      x = r.state;
      if (r.done) break;
    }
  }
  return total / static_cast<double>(episodes);
}

}  // namespace famrl
