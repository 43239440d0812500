#include "famrl/learner.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "famrl/errors.hpp"
#include "famrl/retrace.hpp"

namespace famrl {

Learner::Learner(LearnerConfig config, ValueConfig values, PolicyFamily family, std::size_t states,
                 std::size_t actions)
    : config_(config),
      values_(values),
      family_(std::move(family)),
      online_(family_.size(), states, actions, config.init_value),
      target_(online_),
      grad_sum_(family_.size(), states, actions, 0.0),
      grad_count_(2 * family_.size() * states * actions, 0) {
  if (config_.batch_size == 0) throw ConfigError("batch size must be positive");
  if (config_.target_update_period == 0) throw ConfigError("target update period must be positive");
  if (!(config_.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (values_.transformed_mix && !values_.transform)
    throw ConfigError("the transformed mix requires transformed losses");
  if (config_.optimizer == OptimizerKind::adam) {
    adam_m_ = ValueTables(family_.size(), states, actions, 0.0);
    adam_v_ = adam_m_;
  }
}

LearnerUpdate Learner::update(std::span<const TransitionSequence> batch) {
  const OptionalTransform loss_t = values_.loss_transform();
  const OptionalTransform mix_t = values_.mix_transform();
  const std::size_t A = online_.num_actions();

  struct Targets {
    SequenceTargets e;
    SequenceTargets i;
  };
  std::vector<Targets> targets;
  targets.reserve(batch.size());
  const std::size_t table_size = online_.num_states() * A;
  // Flat key: (component * N + j) * table_size + x * A + a.
  auto accumulate = [&](int component, std::size_t j, std::size_t idx, double g) {
    const std::size_t key = (component * family_.size() + j) * table_size + idx;
    if (grad_count_[key]++ == 0) touched_.push_back(key);
    (component == 0 ? grad_sum_.extrinsic[j] : grad_sum_.intrinsic[j]).values()[idx] += g;
  };
  LearnerUpdate out;

  for (const auto& seq : batch) {
    const std::size_t j = seq.family_index;
    if (j >= family_.size()) throw SchemaViolation("sequence family index outside the family");
    const TraceConfig trace{values_.retrace_lambda, family_.gamma(j)};
    const GreedyMixPolicy pi(target_.extrinsic[j], target_.intrinsic[j], family_.beta(j), mix_t);
    Targets t{sequence_targets(seq, target_.extrinsic[j], pi, trace, loss_t, RewardSelect::extrinsic()),
              sequence_targets(seq, target_.intrinsic[j], pi, trace, loss_t, RewardSelect::intrinsic())};
    for (std::size_t s = 0; s < seq.valid_length; ++s) {
      const Transition& step = seq.steps[s];
      const std::size_t idx = step.observation * A + step.action;
      const double de = online_.extrinsic[j](step.observation, step.action) - t.e.target[s];
      const double di = online_.intrinsic[j](step.observation, step.action) - t.i.target[s];
      out.loss_extrinsic += de * de;
      out.loss_intrinsic += di * di;
      accumulate(0, j, idx, de);
      accumulate(1, j, idx, di);
    }
    targets.push_back(std::move(t));
  }

  ++updates_;
  const double t_adam = static_cast<double>(updates_);
  for (const std::size_t key : touched_) {
    const std::size_t idx = key % table_size;
    const std::size_t j = (key / table_size) % family_.size();
    const int component = static_cast<int>(key / table_size / family_.size());
    QTable& q = component == 0 ? online_.extrinsic[j] : online_.intrinsic[j];
    double& value = q.values()[idx];
    double& sum = (component == 0 ? grad_sum_.extrinsic[j] : grad_sum_.intrinsic[j]).values()[idx];
    const double g = sum / static_cast<double>(grad_count_[key]);
    sum = 0.0;
    grad_count_[key] = 0;
    if (config_.optimizer == OptimizerKind::sgd) {
      value -= config_.learning_rate * g;
    } else {
      // Lazy Adam: moments of entries absent from the batch are left untouched.
      double& m = (component == 0 ? adam_m_.extrinsic[j] : adam_m_.intrinsic[j]).values()[idx];
      double& v = (component == 0 ? adam_v_.extrinsic[j] : adam_v_.intrinsic[j]).values()[idx];
      m = config_.adam_beta1 * m + (1.0 - config_.adam_beta1) * g;
      v = config_.adam_beta2 * v + (1.0 - config_.adam_beta2) * g * g;
      const double m_hat = m / (1.0 - std::pow(config_.adam_beta1, t_adam));
      const double v_hat = v / (1.0 - std::pow(config_.adam_beta2, t_adam));
      value -= config_.adam_learning_rate * m_hat / (std::sqrt(v_hat) + config_.adam_epsilon);
    }
    if (!std::isfinite(value) || std::abs(value) > config_.divergence_bound)
      throw DivergenceError("learner table entry left the divergence bound (family index " + std::to_string(j) +
                            ", entry " + std::to_string(idx) + ", update " + std::to_string(updates_) + ")");
  }

  touched_.clear();

  out.priorities.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& seq = batch[b];
    const std::size_t j = seq.family_index;
    std::vector<double> td[2] = {std::vector<double>(seq.valid_length), std::vector<double>(seq.valid_length)};
    for (std::size_t s = 0; s < seq.valid_length; ++s) {
      const Transition& step = seq.steps[s];
      td[0][s] = targets[b].e.target[s] - online_.extrinsic[j](step.observation, step.action);
      td[1][s] = targets[b].i.target[s] - online_.intrinsic[j](step.observation, step.action);
    }
    out.priorities.push_back(sequence_priority(std::span<const std::vector<double>>(td, 2), seq.valid_length,
                                               config_.priority_exponent));
  }

  if (updates_ % config_.target_update_period == 0) {
    refresh_target();
    out.target_refreshed = true;
  }
  return out;
}

std::optional<LearnerUpdate> Learner::step(SequenceReplay& replay, Rng& rng) {
  auto batch = replay.sample(config_.batch_size, rng);
  if (!batch) return std::nullopt;
  LearnerUpdate u = update(batch->sequences);
  replay.update_priorities(batch->ids, u.priorities);
  return u;
}

std::shared_ptr<const ValueTables> Learner::snapshot() const {
  if (!snapshot_ || snapshot_version_ != updates_) {
    snapshot_ = std::make_shared<const ValueTables>(online_);
    snapshot_version_ = updates_;
  }
  return snapshot_;
}

}  // namespace famrl
