#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "famrl/decomposition.hpp"
#include "famrl/mdp.hpp"
#include "famrl/sequence.hpp"
#include "famrl/transform.hpp"

namespace famrl {

struct TraceConfig {
  double lambda = 0.95;
  double gamma = 0.99;
};

/// Throws InvalidArgument unless 0 <= lambda <= 1 and 0 < gamma < 1.
void validate_trace_config(const TraceConfig& cfg);

/// c = lambda * min(1, pi / mu). Throws DegenerateProbabilityError when mu == 0.
double trace_coefficient(double pi_prob, double mu_prob, const TraceConfig& cfg);

// ---------------------------------------------------------------------------
// Exact operator

/// Tail mass below which the truncated expectation is considered exact.
inline constexpr double kRetraceTailTolerance = 1e-12;

struct RetraceExactResult {
  QTable q;
  std::size_t horizon = 0;
  /// Upper bound on the dropped terms: (gamma lambda)^H / (1 - gamma lambda) * ||delta||_inf.
  double tail_bound = 0.0;
  /// Set when tail_bound exceeds kRetraceTailTolerance.
  bool truncation_warning = false;
};

/// T^{mu,pi} Q computed by exact forward propagation of the trace-weighted
/// state-action distribution (no sampling). With a transform, the transformed
/// operator h(h^{-1}(Q) + E[sum ...delta^h]) is applied. `horizon == 0`
/// picks the smallest horizon whose tail bound is below kRetraceTailTolerance.
RetraceExactResult retrace_operator_exact(const TabularMdp& mdp, const StochasticPolicy& mu,
                                          const StochasticPolicy& pi, const QTable& q, const TraceConfig& cfg,
                                          std::size_t horizon = 0, RewardSelect reward = RewardSelect::extrinsic(),
                                          const OptionalTransform& transform = std::nullopt);

/// Behaviour policy as a function of the current table.
using BehaviorRule = std::function<StochasticPolicy(const QTable&)>;
BehaviorRule epsilon_greedy_rule(double eps = 0.1);

struct RetraceControlOptions {
  std::size_t iters = 300;
  RewardSelect reward = RewardSelect::extrinsic();
  OptionalTransform transform;
  /// Defaults to epsilon_greedy_rule(0.1).
  BehaviorRule behavior;
  std::size_t horizon = 0;
  double divergence_bound = 1e9;
  /// Called with (k, Q_k) for k = 0..iters.
  std::function<void(std::size_t, const QTable&)> on_iterate;
};

/// pi_k = G(Q_k), mu_k = behavior(Q_k), Q_{k+1} = T^{mu_k,pi_k} Q_k.
/// Throws DivergenceError once ||Q||_inf exceeds the bound.
QTable retrace_control_scheme(const TabularMdp& mdp, const QTable& q0, const TraceConfig& cfg,
                              const RetraceControlOptions& options = {});

struct DecomposedRetraceResult {
  QTable q_extrinsic;
  QTable q_intrinsic;
  QTable q_mixed;
};

struct DecomposedRetraceOptions {
  std::size_t iters = 200;
  OptionalTransform transform;
  /// Applied to the mixed table; defaults to epsilon_greedy_rule(0.1).
  BehaviorRule behavior;
  std::size_t horizon = 0;
  double divergence_bound = 1e9;
  /// Called with (k, Q^e_k, Q^i_k, mix_k) for k = 0..iters.
  std::function<void(std::size_t, const QTable&, const QTable&, const QTable&)> on_iterate;
};

/// Decomposed Retrace scheme: the greedy and behaviour policies come from the
/// mix; each component is backed up by its own Retrace operator.
DecomposedRetraceResult retrace_decomposed_scheme(const TabularMdp& mdp, const QTable& q_e0, const QTable& q_i0,
                                                  double beta, const TraceConfig& cfg,
                                                  const DecomposedRetraceOptions& options = {});

// ---------------------------------------------------------------------------
// Sampled targets and losses

/// Target policy queried only on visited states.
class TargetPolicy {
 public:
  virtual ~TargetPolicy() = default;
  virtual double prob(std::size_t x, std::size_t a) const = 0;
};

class TablePolicy final : public TargetPolicy {
 public:
  explicit TablePolicy(StochasticPolicy pi) : pi_(std::move(pi)) {}
  double prob(std::size_t x, std::size_t a) const override { return pi_(x, a); }

 private:
  StochasticPolicy pi_;
};

/// Greedy (lowest index on ties) with respect to the mix of two tables.
class GreedyMixPolicy final : public TargetPolicy {
 public:
  GreedyMixPolicy(const QTable& q_extrinsic, const QTable& q_intrinsic, double beta,
                  OptionalTransform mix_transform = std::nullopt)
      : qe_(q_extrinsic), qi_(q_intrinsic), beta_(beta), transform_(std::move(mix_transform)) {}
  double prob(std::size_t x, std::size_t a) const override { return greedy_action(x) == a ? 1.0 : 0.0; }
  // Remembers the last state asked about, so an instance is not thread-safe.
  std::size_t greedy_action(std::size_t x) const;

 private:
  std::size_t compute_greedy(std::size_t x) const;

  const QTable& qe_;
  const QTable& qi_;
  double beta_;
  OptionalTransform transform_;
  mutable std::size_t cached_state_ = static_cast<std::size_t>(-1);
  mutable std::size_t cached_action_ = 0;
};

/// Reward of a stored step for the selected component.
double step_reward(const Transition& t, RewardSelect reward);

struct SequenceTargets {
  std::vector<double> target;  // per step; 0 on padding
  std::vector<double> delta;   // TD error delta_s (delta^h_s when transformed); 0 on padding
};

/// Finite sampled Retrace targets for one sequence, built from the target
/// table only:
///   target_s = Q(x_s, a_s) + sum_{j >= s} gamma^{j-s} (prod_{i=s+1}^{j} c_i) delta_j
/// or, with a transform, h(h^{-1}(Q(x_s, a_s)) + the same sum over delta^h).
/// Throws SchemaViolation when the sequence crosses an episode boundary.
SequenceTargets sequence_targets(const TransitionSequence& seq, const QTable& q_target, const TargetPolicy& pi,
                                 const TraceConfig& cfg, const OptionalTransform& transform = std::nullopt,
                                 RewardSelect reward = RewardSelect::extrinsic());

struct RetraceTargets {
  std::vector<SequenceTargets> sequences;
};

RetraceTargets retrace_targets_sampled(std::span<const TransitionSequence> batch, const QTable& q_target,
                                       const TargetPolicy& pi, const TraceConfig& cfg,
                                       const OptionalTransform& transform = std::nullopt,
                                       RewardSelect reward = RewardSelect::extrinsic());

struct RetraceLoss {
  double loss = 0.0;
  /// td[b][s] = target - Q_online(x_s, a_s); 0 on padding.
  std::vector<std::vector<double>> td;
};

/// sum_b sum_s (Q_online(x_s, a_s) - target_s)^2 over valid steps.
RetraceLoss retrace_loss(std::span<const TransitionSequence> batch, const QTable& q_online,
                         const RetraceTargets& targets);

/// d loss / d Q_online, i.e. 2 (Q - target) accumulated per visited entry.
QTable retrace_loss_gradient(std::span<const TransitionSequence> batch, const QTable& q_online,
                             const RetraceTargets& targets);

}  // namespace famrl
