#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "famrl/mdp.hpp"
#include "famrl/transform.hpp"

namespace famrl {

/// Rejects discounts outside the open interval ]0, 1[.
void require_discount(double gamma);

/// T^pi_r Q = r + gamma P^pi Q.
QTable bellman_eval_step(const TabularMdp& mdp, const StochasticPolicy& pi, const QTable& q, double gamma,
                         RewardSelect reward = RewardSelect::extrinsic());

/// T^pi_{r,h} Q = h(r + gamma P^pi h^{-1}(Q)).
QTable transformed_bellman_eval_step(const TabularMdp& mdp, const StochasticPolicy& pi, const QTable& q,
                                     double gamma, const ValueTransform& t,
                                     RewardSelect reward = RewardSelect::extrinsic());

/// Deterministic greedy policy; ties go to the lowest action index.
StochasticPolicy greedy_policy(const QTable& q);
std::vector<std::size_t> greedy_actions(const QTable& q);

/// Applies h or h^{-1} to every entry.
QTable apply_transform(const QTable& q, const ValueTransform& t);
QTable apply_inverse_transform(const QTable& q, const ValueTransform& t);

struct ValueIterationOptions {
  double tol = 1e-10;
  std::size_t max_iters = 1'000'000;
  /// Starting table; zeros when empty.
  std::optional<QTable> q0;
  /// When set, iterate the transformed scheme Q <- T^{G(Q)}_{r,h} Q.
  OptionalTransform transform;
};

struct ValueIterationResult {
  QTable q;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// pi_k = G(Q_k), Q_{k+1} = T^{pi_k} Q_k until ||Q_{k+1} - Q_k||_inf <= tol.
/// Throws ConvergenceError (carrying the last residual) after max_iters.
ValueIterationResult value_iteration(const TabularMdp& mdp, double gamma, RewardSelect reward = RewardSelect::extrinsic(),
                                     const ValueIterationOptions& options = {});

/// Q^pi from the sparse linear system (I - gamma P^pi) Q = r.
QTable policy_eval_exact(const TabularMdp& mdp, const StochasticPolicy& pi, double gamma,
                         RewardSelect reward = RewardSelect::extrinsic());

/// max_{x,a} |(T^{G(Q)} Q - Q)(x, a)|
double bellman_optimality_residual(const TabularMdp& mdp, const QTable& q, double gamma,
                                   RewardSelect reward = RewardSelect::extrinsic());

/// Reward table r(x, a) for the selected component, row-major.
std::vector<double> reward_table(const TabularMdp& mdp, RewardSelect reward);

}  // namespace famrl
