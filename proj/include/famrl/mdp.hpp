#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace famrl {

/// Which reward table a backup uses. `mixed` means r^e + beta r^i.
struct RewardSelect {
  enum class Kind { extrinsic, intrinsic, mixed };
  Kind kind = Kind::extrinsic;
  double beta = 0.0;

  static RewardSelect extrinsic() { return {Kind::extrinsic, 0.0}; }
  static RewardSelect intrinsic() { return {Kind::intrinsic, 0.0}; }
  static RewardSelect mixed(double beta) { return {Kind::mixed, beta}; }
};

/// Dense (states x actions) table of reals, row-major by state.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t states, std::size_t actions, double fill = 0.0)
      : states_(states), actions_(actions), values_(states * actions, fill) {}

  std::size_t num_states() const noexcept { return states_; }
  std::size_t num_actions() const noexcept { return actions_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t x, std::size_t a) { return values_[x * actions_ + a]; }
  double operator()(std::size_t x, std::size_t a) const { return values_[x * actions_ + a]; }

  std::span<double> row(std::size_t x) { return {values_.data() + x * actions_, actions_}; }
  std::span<const double> row(std::size_t x) const { return {values_.data() + x * actions_, actions_}; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const QTable& other) const noexcept {
    return states_ == other.states_ && actions_ == other.actions_;
  }

  /// Sup-norm of the difference; shapes must match.
  double max_abs_diff(const QTable& other) const;
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> values_;
};

/// pi(a|x) as a (states x actions) table whose rows sum to one.
class StochasticPolicy {
 public:
  StochasticPolicy() = default;
  /// Validates rows (non-negative, sum to 1 within 1e-12).
  explicit StochasticPolicy(QTable probs);

  static StochasticPolicy uniform(std::size_t states, std::size_t actions);
  /// Mass one on actions[x] in state x.
  static StochasticPolicy deterministic(std::span<const std::size_t> actions, std::size_t num_actions);
  /// (1 - eps) on the greedy action of q (lowest index on ties) plus eps / |A| everywhere.
  static StochasticPolicy epsilon_greedy(const QTable& q, double eps);

  std::size_t num_states() const noexcept { return probs_.num_states(); }
  std::size_t num_actions() const noexcept { return probs_.num_actions(); }
  double operator()(std::size_t x, std::size_t a) const { return probs_(x, a); }
  std::span<const double> row(std::size_t x) const { return probs_.row(x); }
  const QTable& table() const noexcept { return probs_; }

 private:
  QTable probs_;
};

struct Successor {
  std::size_t state;
  double prob;
};

/// Finite MDP with sparse transition rows. Terminal states are absorbing
/// zero-reward self-loops under every action.
class TabularMdp {
 public:
  TabularMdp() = default;

  /// `transitions[x * actions + a]` lists the successors of (x, a).
  /// Empty `reward_intrinsic` means all zeros; empty `terminal` means none.
  TabularMdp(std::size_t states, std::size_t actions, std::vector<std::vector<Successor>> transitions,
             std::vector<double> reward_extrinsic, std::vector<double> reward_intrinsic = {},
             std::vector<bool> terminal = {});

  /// Builds from a dense row-major (states x actions x states) tensor; zeros are dropped.
  static TabularMdp from_dense(std::size_t states, std::size_t actions, std::span<const double> transition,
                               std::vector<double> reward_extrinsic, std::vector<double> reward_intrinsic = {},
                               std::vector<bool> terminal = {});

  std::size_t num_states() const noexcept { return states_; }
  std::size_t num_actions() const noexcept { return actions_; }

  std::span<const Successor> successors(std::size_t x, std::size_t a) const {
    const std::size_t sa = x * actions_ + a;
    return {successors_.data() + offsets_[sa], offsets_[sa + 1] - offsets_[sa]};
  }
  double transition_prob(std::size_t x, std::size_t a, std::size_t y) const;

  double reward_extrinsic(std::size_t x, std::size_t a) const { return reward_e_[x * actions_ + a]; }
  double reward_intrinsic(std::size_t x, std::size_t a) const { return reward_i_[x * actions_ + a]; }
  double reward(std::size_t x, std::size_t a, RewardSelect select) const;
  bool is_terminal(std::size_t x) const { return terminal_[x]; }

  std::span<const double> rewards_extrinsic() const noexcept { return reward_e_; }
  std::span<const double> rewards_intrinsic() const noexcept { return reward_i_; }
  const std::vector<bool>& terminal_mask() const noexcept { return terminal_; }
  std::size_t num_transitions() const noexcept { return successors_.size(); }

 private:
  void validate() const;

  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Successor> successors_;
  std::vector<double> reward_e_;
  std::vector<double> reward_i_;
  std::vector<bool> terminal_;
};

/// Throws DimensionError unless the table matches the MDP's shape.
void require_shape(const TabularMdp& mdp, const QTable& q, const char* what);
void require_shape(const TabularMdp& mdp, const StochasticPolicy& pi, const char* what);

}  // namespace famrl
