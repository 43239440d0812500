#include "famrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "famrl/errors.hpp"

namespace famrl {

namespace {
constexpr double kStochasticTol = 1e-12;

void check_row(std::span<const double> row, std::size_t x) {
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) throw InvalidArgument("policy row " + std::to_string(x) + " has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kStochasticTol)
    throw InvalidArgument("policy row " + std::to_string(x) + " does not sum to one");
}
}  // namespace

double QTable::max_abs_diff(const QTable& other) const {
  if (!same_shape(other)) throw DimensionError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m = std::max(m, std::abs(values_[i] - other.values_[i]));
  return m;
}

double QTable::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool QTable::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

StochasticPolicy::StochasticPolicy(QTable probs) : probs_(std::move(probs)) {
  for (std::size_t x = 0; x < probs_.num_states(); ++x) check_row(probs_.row(x), x);
}

StochasticPolicy StochasticPolicy::uniform(std::size_t states, std::size_t actions) {
  if (actions == 0) throw InvalidArgument("uniform policy needs at least one action");
  return StochasticPolicy(QTable(states, actions, 1.0 / static_cast<double>(actions)));
}

StochasticPolicy StochasticPolicy::deterministic(std::span<const std::size_t> actions, std::size_t num_actions) {
  QTable probs(actions.size(), num_actions);
  for (std::size_t x = 0; x < actions.size(); ++x) {
    if (actions[x] >= num_actions) throw InvalidArgument("deterministic policy: action out of range");
    probs(x, actions[x]) = 1.0;
  }
  return StochasticPolicy(std::move(probs));
}

StochasticPolicy StochasticPolicy::epsilon_greedy(const QTable& q, double eps) {
  if (eps < 0.0 || eps > 1.0) throw InvalidArgument("epsilon_greedy: eps must lie in [0, 1]");
  const std::size_t A = q.num_actions();
  QTable probs(q.num_states(), A, eps / static_cast<double>(A));
  for (std::size_t x = 0; x < q.num_states(); ++x) {
    auto row = q.row(x);
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    probs(x, best) += 1.0 - eps;
  }
  return StochasticPolicy(std::move(probs));
}

TabularMdp::TabularMdp(std::size_t states, std::size_t actions, std::vector<std::vector<Successor>> transitions,
                       std::vector<double> reward_extrinsic, std::vector<double> reward_intrinsic,
                       std::vector<bool> terminal)
    : states_(states),
      actions_(actions),
      reward_e_(std::move(reward_extrinsic)),
      reward_i_(std::move(reward_intrinsic)),
      terminal_(std::move(terminal)) {
  if (states == 0 || actions == 0) throw InvalidArgument("TabularMdp: empty state or action space");
  const std::size_t sa = states * actions;
  if (transitions.size() != sa) throw DimensionError("TabularMdp: transition rows != states * actions");
  if (reward_i_.empty()) reward_i_.assign(sa, 0.0);
  if (terminal_.empty()) terminal_.assign(states, false);
  if (reward_e_.size() != sa || reward_i_.size() != sa) throw DimensionError("TabularMdp: reward table shape");
  if (terminal_.size() != states) throw DimensionError("TabularMdp: terminal mask shape");

  offsets_.reserve(sa + 1);
  offsets_.push_back(0);
  for (auto& row : transitions) {
    successors_.insert(successors_.end(), row.begin(), row.end());
    offsets_.push_back(successors_.size());
  }
  validate();
}

TabularMdp TabularMdp::from_dense(std::size_t states, std::size_t actions, std::span<const double> transition,
                                  std::vector<double> reward_extrinsic, std::vector<double> reward_intrinsic,
                                  std::vector<bool> terminal) {
  if (transition.size() != states * actions * states) throw DimensionError("from_dense: transition tensor shape");
  std::vector<std::vector<Successor>> rows(states * actions);
  for (std::size_t sa = 0; sa < states * actions; ++sa) {
    for (std::size_t y = 0; y < states; ++y) {
      const double p = transition[sa * states + y];
      if (p != 0.0) rows[sa].push_back({y, p});
    }
  }
  return TabularMdp(states, actions, std::move(rows), std::move(reward_extrinsic), std::move(reward_intrinsic),
                    std::move(terminal));
}

void TabularMdp::validate() const {
  for (std::size_t x = 0; x < states_; ++x) {
    for (std::size_t a = 0; a < actions_; ++a) {
      double total = 0.0;
      for (const auto& s : successors(x, a)) {
        if (s.state >= states_) throw InvalidArgument("TabularMdp: successor index out of range");
        if (!(s.prob >= 0.0)) throw InvalidArgument("TabularMdp: negative transition probability");
        total += s.prob;
      }
      if (std::abs(total - 1.0) > kStochasticTol)
        throw InvalidArgument("TabularMdp: transition row (" + std::to_string(x) + ", " + std::to_string(a) +
                              ") does not sum to one");
      const double re = reward_e_[x * actions_ + a];
      const double ri = reward_i_[x * actions_ + a];
      if (!std::isfinite(re) || !std::isfinite(ri)) throw InvalidArgument("TabularMdp: non-finite reward");
      if (terminal_[x]) {
        if (re != 0.0 || ri != 0.0) throw InvalidArgument("TabularMdp: terminal state with non-zero reward");
        if (transition_prob(x, a, x) != 1.0) throw InvalidArgument("TabularMdp: terminal state must self-loop");
      }
    }
  }
}

double TabularMdp::transition_prob(std::size_t x, std::size_t a, std::size_t y) const {
  double p = 0.0;
  for (const auto& s : successors(x, a))
    if (s.state == y) p += s.prob;
  return p;
}

double TabularMdp::reward(std::size_t x, std::size_t a, RewardSelect select) const {
  switch (select.kind) {
    case RewardSelect::Kind::extrinsic:
      return reward_extrinsic(x, a);
    case RewardSelect::Kind::intrinsic:
      return reward_intrinsic(x, a);
    case RewardSelect::Kind::mixed:
      return reward_extrinsic(x, a) + select.beta * reward_intrinsic(x, a);
  }
  return 0.0;
}

void require_shape(const TabularMdp& mdp, const QTable& q, const char* what) {
  if (q.num_states() != mdp.num_states() || q.num_actions() != mdp.num_actions())
    throw DimensionError(std::string(what) + ": Q table shape does not match the MDP");
}

void require_shape(const TabularMdp& mdp, const StochasticPolicy& pi, const char* what) {
  if (pi.num_states() != mdp.num_states() || pi.num_actions() != mdp.num_actions())
    throw DimensionError(std::string(what) + ": policy shape does not match the MDP");
}

}  // namespace famrl
