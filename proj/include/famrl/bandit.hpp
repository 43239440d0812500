#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <vector>

#include "famrl/rng.hpp"

namespace famrl {

enum class BanditRule {
  /// Windowed mean plus bonus * sqrt(1 / N), with epsilon-uniform exploration.
  simplified_sw_ucb,
  /// Whole-history UCB1: mean + bonus * sqrt(2 log k / N).
  ucb1,
  /// Windowed mean plus bonus * sqrt(log min(k, window) / N).
  sliding_window_ucb,
};

struct BanditConfig {
  std::size_t num_arms = 1;
  std::size_t window = 160;
  double eps = 0.5;
  double bonus = 1.0;
  BanditRule rule = BanditRule::simplified_sw_ucb;
};

/// Actor defaults: window 160, eps 0.5.
BanditConfig actor_bandit_config(std::size_t num_arms);
/// Evaluator defaults: window 3600, eps 0.01.
BanditConfig evaluator_bandit_config(std::size_t num_arms);

struct ArmPull {
  std::size_t arm = 0;
  double reward = 0.0;
  friend bool operator==(const ArmPull&, const ArmPull&) = default;
};

/// Non-stationary bandit over family indices. Statistics are recomputed from
/// the stored window on every query, so they depend on nothing older.
class BanditState {
 public:
  explicit BanditState(BanditConfig config);

  /// Round-robin for the first num_arms steps, then the configured rule.
  /// Never-pulled arms (inside the window) are chosen before any scoring.
  /// When `scores_seen` is given it receives the scores the rule looked at.
  std::size_t select_arm(Rng& rng, std::vector<double>* scores_seen = nullptr) const;
  void update(std::size_t arm, double reward);

  /// Pull counts and mean rewards over the window (ucb1: over all history).
  std::vector<std::size_t> counts() const;
  std::vector<double> means() const;
  /// Scores used by the rule; +inf for arms with zero count.
  std::vector<double> scores() const;
  /// argmax of the windowed means, lowest index on ties; zero-count arms are skipped.
  std::size_t greedy_arm() const;

  std::uint64_t steps() const noexcept { return k_; }
  const std::deque<ArmPull>& history() const noexcept { return history_; }
  const BanditConfig& config() const noexcept { return config_; }

 private:
  void window_stats(std::vector<std::size_t>& n, std::vector<double>& mean) const;

  BanditConfig config_;
  std::deque<ArmPull> history_;
  std::uint64_t k_ = 0;
  // Whole-history statistics for ucb1.
  std::vector<std::size_t> total_counts_;
  std::vector<double> total_sums_;
};

struct BanditSimConfig {
  /// Bernoulli success probability per arm.
  std::vector<double> means;
  std::size_t steps = 10'000;
  /// From this step on the arm means are used in reverse order (0 = never).
  std::size_t swap_at = 0;
};

struct BanditSimStep {
  std::size_t step = 0;
  std::size_t arm = 0;
  double reward = 0.0;
  /// Scores seen by the selection at this step.
  std::vector<double> scores;
};

std::vector<BanditSimStep> simulate_bandit(const BanditConfig& bandit, const BanditSimConfig& sim, Rng& rng);

/// Fraction of steps in [first, last) whose arm had the highest mean at that step.
double best_arm_frequency(const std::vector<BanditSimStep>& trace, const BanditSimConfig& sim, std::size_t first,
                          std::size_t last);

/// Header step,arm,reward,score_0,...,score_{N-1}.
void write_bandit_csv(std::ostream& out, const std::vector<BanditSimStep>& trace, std::size_t num_arms);

}  // namespace famrl
