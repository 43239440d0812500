#include "famrl/bellman.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "famrl/errors.hpp"
#include "famrl/kernels.hpp"

namespace famrl {

void require_discount(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("discount must lie in ]0, 1[");
}

std::vector<double> reward_table(const TabularMdp& mdp, RewardSelect reward) {
  const std::size_t A = mdp.num_actions();
  std::vector<double> r(mdp.num_states() * A);
  for (std::size_t x = 0; x < mdp.num_states(); ++x)
    for (std::size_t a = 0; a < A; ++a) r[x * A + a] = mdp.reward(x, a, reward);
  return r;
}

QTable bellman_eval_step(const TabularMdp& mdp, const StochasticPolicy& pi, const QTable& q, double gamma,
                         RewardSelect reward) {
  require_discount(gamma);
  require_shape(mdp, q, "bellman_eval_step");
  require_shape(mdp, pi, "bellman_eval_step");
  std::vector<double> v(mdp.num_states());
  kernels::weighted_state_sum(pi.table(), q, v);
  QTable out(mdp.num_states(), mdp.num_actions());
  kernels::backup(mdp, reward_table(mdp, reward), gamma, v, out);
  return out;
}

QTable transformed_bellman_eval_step(const TabularMdp& mdp, const StochasticPolicy& pi, const QTable& q,
                                     double gamma, const ValueTransform& t, RewardSelect reward) {
  require_discount(gamma);
  require_shape(mdp, q, "transformed_bellman_eval_step");
  require_shape(mdp, pi, "transformed_bellman_eval_step");
  QTable raw = apply_inverse_transform(q, t);
  std::vector<double> v(mdp.num_states());
  kernels::weighted_state_sum(pi.table(), raw, v);
  QTable out(mdp.num_states(), mdp.num_actions());
  kernels::backup(mdp, reward_table(mdp, reward), gamma, v, out);
  kernels::transform_values(out.values(), t, /*inverse=*/false);
  return out;
}

std::vector<std::size_t> greedy_actions(const QTable& q) {
  std::vector<std::size_t> best(q.num_states());
  kernels::greedy_actions(q, best);
  return best;
}

StochasticPolicy greedy_policy(const QTable& q) {
  return StochasticPolicy::deterministic(greedy_actions(q), q.num_actions());
}

QTable apply_transform(const QTable& q, const ValueTransform& t) {
  QTable out = q;
  kernels::transform_values(out.values(), t, false);
  return out;
}

QTable apply_inverse_transform(const QTable& q, const ValueTransform& t) {
  QTable out = q;
  kernels::transform_values(out.values(), t, true);
  return out;
}

ValueIterationResult value_iteration(const TabularMdp& mdp, double gamma, RewardSelect reward,
                                     const ValueIterationOptions& options) {
  require_discount(gamma);
  if (!(options.tol > 0.0)) throw InvalidArgument("value_iteration: tol must be positive");
  QTable q = options.q0 ? *options.q0 : QTable(mdp.num_states(), mdp.num_actions());
  require_shape(mdp, q, "value_iteration");

  double residual = 0.0;
  for (std::size_t k = 1; k <= options.max_iters; ++k) {
    const StochasticPolicy pi = greedy_policy(q);
    QTable next = options.transform ? transformed_bellman_eval_step(mdp, pi, q, gamma, *options.transform, reward)
                                    : bellman_eval_step(mdp, pi, q, gamma, reward);
    residual = next.max_abs_diff(q);
    q = std::move(next);
    if (residual <= options.tol) return {std::move(q), k, residual};
  }
  throw ConvergenceError("value_iteration did not converge", residual);
}

QTable policy_eval_exact(const TabularMdp& mdp, const StochasticPolicy& pi, double gamma, RewardSelect reward) {
  require_discount(gamma);
  require_shape(mdp, pi, "policy_eval_exact");
  const std::size_t A = mdp.num_actions();
  const auto n = static_cast<Eigen::Index>(mdp.num_states() * A);

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n) + mdp.num_transitions() * A);
  Eigen::VectorXd rhs(n);
  for (std::size_t x = 0; x < mdp.num_states(); ++x) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto row = static_cast<Eigen::Index>(x * A + a);
      rhs[row] = mdp.reward(x, a, reward);
      entries.emplace_back(row, row, 1.0);
      for (const auto& s : mdp.successors(x, a)) {
        for (std::size_t b = 0; b < A; ++b) {
          const double w = gamma * s.prob * pi(s.state, b);
          if (w != 0.0) entries.emplace_back(row, static_cast<Eigen::Index>(s.state * A + b), -w);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(system);
  if (solver.info() != Eigen::Success) throw InternalError("policy_eval_exact: singular evaluation system");
  const Eigen::VectorXd sol = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw InternalError("policy_eval_exact: solve failed");

  QTable q(mdp.num_states(), A);
  for (Eigen::Index i = 0; i < n; ++i) q.values()[static_cast<std::size_t>(i)] = sol[i];
  return q;
}

double bellman_optimality_residual(const TabularMdp& mdp, const QTable& q, double gamma, RewardSelect reward) {
  return bellman_eval_step(mdp, greedy_policy(q), q, gamma, reward).max_abs_diff(q);
}

}  // namespace famrl
