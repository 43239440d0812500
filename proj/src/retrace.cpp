#include "famrl/retrace.hpp"

#include <algorithm>
#include <cmath>

#include "famrl/bellman.hpp"
#include "famrl/errors.hpp"
#include "famrl/kernels.hpp"

namespace famrl {

void validate_trace_config(const TraceConfig& cfg) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw InvalidArgument("trace lambda must lie in [0, 1]");
  require_discount(cfg.gamma);
}

double trace_coefficient(double pi_prob, double mu_prob, const TraceConfig& cfg) {
  if (!(mu_prob > 0.0)) throw DegenerateProbabilityError("trace_coefficient: behaviour probability is zero");
  if (pi_prob < 0.0) throw InvalidArgument("trace_coefficient: negative target probability");
  return cfg.lambda * std::min(1.0, pi_prob / mu_prob);
}

namespace {

std::size_t auto_horizon(double rho, double delta_norm) {
  if (rho == 0.0 || delta_norm == 0.0) return 1;
  const double h = std::log(kRetraceTailTolerance * (1.0 - rho) / delta_norm) / std::log(rho);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::max(h, 1.0))));
}

void check_divergence(const QTable& q, double bound) {
  if (!q.all_finite() || q.max_abs() > bound) throw DivergenceError("Retrace scheme diverged");
}

}  // namespace

RetraceExactResult retrace_operator_exact(const TabularMdp& mdp, const StochasticPolicy& mu,
                                          const StochasticPolicy& pi, const QTable& q, const TraceConfig& cfg,
                                          std::size_t horizon, RewardSelect reward,
                                          const OptionalTransform& transform) {
  validate_trace_config(cfg);
  require_shape(mdp, q, "retrace_operator_exact");
  require_shape(mdp, mu, "retrace_operator_exact");
  require_shape(mdp, pi, "retrace_operator_exact");
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();

  const QTable base = transform ? apply_inverse_transform(q, *transform) : q;

  // Expected TD error of every (x, a) under pi.
  std::vector<double> v(S);
  kernels::weighted_state_sum(pi.table(), base, v);
  QTable delta(S, A);
  kernels::backup(mdp, reward_table(mdp, reward), cfg.gamma, v, delta);
  for (std::size_t i = 0; i < delta.size(); ++i) delta.values()[i] -= base.values()[i];

  // mu(b|y) c(y, b) = lambda min(mu, pi): the trace-weighted one-step kernel.
  QTable trace_weight(S, A);
  for (std::size_t y = 0; y < S; ++y)
    for (std::size_t b = 0; b < A; ++b) trace_weight(y, b) = cfg.lambda * std::min(mu(y, b), pi(y, b));

  const double rho = cfg.gamma * cfg.lambda;
  const double delta_norm = delta.max_abs();
  RetraceExactResult result;
  result.horizon = horizon == 0 ? auto_horizon(rho, delta_norm) : horizon;

  QTable acc = delta;
  QTable current = delta;
  QTable next(S, A);
  for (std::size_t t = 1; t < result.horizon; ++t) {
    kernels::weighted_state_sum(trace_weight, current, v);
    kernels::backup(mdp, {}, cfg.gamma, v, next);
    for (std::size_t i = 0; i < acc.size(); ++i) acc.values()[i] += next.values()[i];
    std::swap(current, next);
  }

  result.tail_bound =
      rho == 0.0 ? 0.0 : std::pow(rho, static_cast<double>(result.horizon)) / (1.0 - rho) * delta_norm;
  result.truncation_warning = result.tail_bound > kRetraceTailTolerance;

  for (std::size_t i = 0; i < acc.size(); ++i) acc.values()[i] += base.values()[i];
  if (transform) kernels::transform_values(acc.values(), *transform, /*inverse=*/false);
  result.q = std::move(acc);
  return result;
}

BehaviorRule epsilon_greedy_rule(double eps) {
  return [eps](const QTable& q) { return StochasticPolicy::epsilon_greedy(q, eps); };
}

QTable retrace_control_scheme(const TabularMdp& mdp, const QTable& q0, const TraceConfig& cfg,
                              const RetraceControlOptions& options) {
  validate_trace_config(cfg);
  require_shape(mdp, q0, "retrace_control_scheme");
  const BehaviorRule behavior = options.behavior ? options.behavior : epsilon_greedy_rule(0.1);
  QTable q = q0;
  if (options.on_iterate) options.on_iterate(0, q);
  for (std::size_t k = 1; k <= options.iters; ++k) {
    const StochasticPolicy pi = greedy_policy(q);
    const StochasticPolicy mu = behavior(q);
    q = retrace_operator_exact(mdp, mu, pi, q, cfg, options.horizon, options.reward, options.transform).q;
    check_divergence(q, options.divergence_bound);
    if (options.on_iterate) options.on_iterate(k, q);
  }
  return q;
}

DecomposedRetraceResult retrace_decomposed_scheme(const TabularMdp& mdp, const QTable& q_e0, const QTable& q_i0,
                                                  double beta, const TraceConfig& cfg,
                                                  const DecomposedRetraceOptions& options) {
  validate_trace_config(cfg);
  if (beta < 0.0) throw InvalidArgument("retrace_decomposed_scheme: beta must be non-negative");
  require_shape(mdp, q_e0, "retrace_decomposed_scheme");
  require_shape(mdp, q_i0, "retrace_decomposed_scheme");
  const BehaviorRule behavior = options.behavior ? options.behavior : epsilon_greedy_rule(0.1);

  ValuePair vp{q_e0, q_i0, beta};
  QTable mixed = mix(vp, options.transform);
  if (options.on_iterate) options.on_iterate(0, vp.q_extrinsic, vp.q_intrinsic, mixed);
  for (std::size_t k = 1; k <= options.iters; ++k) {
    const StochasticPolicy pi = greedy_policy(mixed);
    const StochasticPolicy mu = behavior(mixed);
    vp.q_extrinsic = retrace_operator_exact(mdp, mu, pi, vp.q_extrinsic, cfg, options.horizon,
                                            RewardSelect::extrinsic(), options.transform)
                         .q;
    vp.q_intrinsic = retrace_operator_exact(mdp, mu, pi, vp.q_intrinsic, cfg, options.horizon,
                                            RewardSelect::intrinsic(), options.transform)
                         .q;
    mixed = mix(vp, options.transform);
    check_divergence(mixed, options.divergence_bound);
    if (options.on_iterate) options.on_iterate(k, vp.q_extrinsic, vp.q_intrinsic, mixed);
  }
  return {std::move(vp.q_extrinsic), std::move(vp.q_intrinsic), std::move(mixed)};
}

std::size_t GreedyMixPolicy::greedy_action(std::size_t x) const {
  if (x != cached_state_) {
    cached_action_ = compute_greedy(x);
    cached_state_ = x;
  }
  return cached_action_;
}

std::size_t GreedyMixPolicy::compute_greedy(std::size_t x) const {
  std::size_t best = 0;
  double best_value = mix_value(qe_(x, 0), qi_(x, 0), beta_, transform_);
  for (std::size_t a = 1; a < qe_.num_actions(); ++a) {
    const double v = mix_value(qe_(x, a), qi_(x, a), beta_, transform_);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

double step_reward(const Transition& t, RewardSelect reward) {
  switch (reward.kind) {
    case RewardSelect::Kind::extrinsic:
      return t.extrinsic_reward;
    case RewardSelect::Kind::intrinsic:
      return t.intrinsic_reward;
    case RewardSelect::Kind::mixed:
      return t.extrinsic_reward + reward.beta * t.intrinsic_reward;
  }
  return 0.0;
}

SequenceTargets sequence_targets(const TransitionSequence& seq, const QTable& q_target, const TargetPolicy& pi,
                                 const TraceConfig& cfg, const OptionalTransform& transform, RewardSelect reward) {
  validate_sequence(seq);
  validate_trace_config(cfg);
  const std::size_t n = seq.valid_length;
  const std::size_t A = q_target.num_actions();
  auto value = [&](std::size_t x, std::size_t a) {
    if (x >= q_target.num_states() || a >= A) throw DimensionError("sequence_targets: index outside the table");
    const double v = q_target(x, a);
    return transform ? transform->inverse(v) : v;
  };

  SequenceTargets out;
  out.target.assign(seq.trace_length(), 0.0);
  out.delta.assign(seq.trace_length(), 0.0);
  std::vector<double> current(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Transition& t = seq.steps[s];
    double bootstrap = 0.0;
    if (!t.terminal) {
      for (std::size_t a = 0; a < A; ++a) {
        const double p = pi.prob(t.next_observation, a);
        if (p != 0.0) bootstrap += p * value(t.next_observation, a);
      }
    }
    current[s] = value(t.observation, t.action);
    out.delta[s] = step_reward(t, reward) + cfg.gamma * bootstrap - current[s];
  }

  double tail = 0.0;
  for (std::size_t s = n; s-- > 0;) {
    if (s + 1 < n) {
      const Transition& next = seq.steps[s + 1];
      tail = out.delta[s] +
             cfg.gamma * trace_coefficient(pi.prob(next.observation, next.action), next.behavior_prob, cfg) * tail;
    } else {
      tail = out.delta[s];
    }
    const double raw = current[s] + tail;
    out.target[s] = transform ? transform->apply(raw) : raw;
  }
  return out;
}

RetraceTargets retrace_targets_sampled(std::span<const TransitionSequence> batch, const QTable& q_target,
                                       const TargetPolicy& pi, const TraceConfig& cfg,
                                       const OptionalTransform& transform, RewardSelect reward) {
  RetraceTargets out;
  out.sequences.reserve(batch.size());
  for (const auto& seq : batch) out.sequences.push_back(sequence_targets(seq, q_target, pi, cfg, transform, reward));
  return out;
}

namespace {
void require_matching(std::span<const TransitionSequence> batch, const RetraceTargets& targets) {
  if (targets.sequences.size() != batch.size()) throw DimensionError("retrace_loss: targets do not match the batch");
  for (std::size_t b = 0; b < batch.size(); ++b)
    if (targets.sequences[b].target.size() != batch[b].trace_length())
      throw DimensionError("retrace_loss: target length does not match the sequence");
}
}  // namespace

RetraceLoss retrace_loss(std::span<const TransitionSequence> batch, const QTable& q_online,
                         const RetraceTargets& targets) {
  require_matching(batch, targets);
  RetraceLoss out;
  out.td.resize(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& seq = batch[b];
    out.td[b].assign(seq.trace_length(), 0.0);
    for (std::size_t s = 0; s < seq.valid_length; ++s) {
      const Transition& t = seq.steps[s];
      const double td = targets.sequences[b].target[s] - q_online(t.observation, t.action);
      out.td[b][s] = td;
      out.loss += td * td;
    }
  }
  return out;
}

QTable retrace_loss_gradient(std::span<const TransitionSequence> batch, const QTable& q_online,
                             const RetraceTargets& targets) {
  require_matching(batch, targets);
  QTable grad(q_online.num_states(), q_online.num_actions());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& seq = batch[b];
    for (std::size_t s = 0; s < seq.valid_length; ++s) {
      const Transition& t = seq.steps[s];
      grad(t.observation, t.action) += 2.0 * (q_online(t.observation, t.action) - targets.sequences[b].target[s]);
    }
  }
  return grad;
}

}  // namespace famrl
