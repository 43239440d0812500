#include "famrl/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "famrl/csv.hpp"
#include "famrl/errors.hpp"

namespace famrl {

BanditConfig actor_bandit_config(std::size_t num_arms) { return {num_arms, 160, 0.5, 1.0}; }
BanditConfig evaluator_bandit_config(std::size_t num_arms) { return {num_arms, 3600, 0.01, 1.0}; }

BanditState::BanditState(BanditConfig config)
    : config_(config), total_counts_(config.num_arms, 0), total_sums_(config.num_arms, 0.0) {
  if (config_.num_arms == 0) throw InvalidArgument("bandit needs at least one arm");
  if (config_.window == 0) throw InvalidArgument("bandit window must be positive");
  if (!(config_.eps >= 0.0 && config_.eps <= 1.0)) throw InvalidArgument("bandit eps must lie in [0, 1]");
  if (!(config_.bonus >= 0.0)) throw InvalidArgument("bandit bonus must be non-negative");
}

void BanditState::window_stats(std::vector<std::size_t>& n, std::vector<double>& mean) const {
  n.assign(config_.num_arms, 0);
  mean.assign(config_.num_arms, 0.0);
  if (config_.rule == BanditRule::ucb1) {
    n = total_counts_;
    for (std::size_t a = 0; a < config_.num_arms; ++a)
      if (n[a] > 0) mean[a] = total_sums_[a] / static_cast<double>(n[a]);
    return;
  }
  for (const auto& p : history_) {
    ++n[p.arm];
    mean[p.arm] += p.reward;
  }
  for (std::size_t a = 0; a < config_.num_arms; ++a)
    if (n[a] > 0) mean[a] /= static_cast<double>(n[a]);
}

std::vector<std::size_t> BanditState::counts() const {
  std::vector<std::size_t> n;
  std::vector<double> mean;
  window_stats(n, mean);
  return n;
}

std::vector<double> BanditState::means() const {
  std::vector<std::size_t> n;
  std::vector<double> mean;
  window_stats(n, mean);
  return mean;
}

std::vector<double> BanditState::scores() const {
  std::vector<std::size_t> n;
  std::vector<double> mean;
  window_stats(n, mean);
  std::vector<double> score(config_.num_arms, std::numeric_limits<double>::infinity());
  double log_term = 1.0;
  if (config_.rule == BanditRule::ucb1) {
    log_term = 2.0 * std::log(static_cast<double>(std::max<std::uint64_t>(k_, 1)));
  } else if (config_.rule == BanditRule::sliding_window_ucb) {
    log_term = std::log(static_cast<double>(std::max<std::uint64_t>(std::min<std::uint64_t>(k_, config_.window), 1)));
  }
  for (std::size_t a = 0; a < config_.num_arms; ++a)
    if (n[a] > 0) score[a] = mean[a] + config_.bonus * std::sqrt(log_term / static_cast<double>(n[a]));
  return score;
}

std::size_t BanditState::select_arm(Rng& rng, std::vector<double>* scores_seen) const {
  const auto score = scores();
  if (scores_seen) *scores_seen = score;
  if (k_ < config_.num_arms) return static_cast<std::size_t>(k_);
  if (config_.rule == BanditRule::simplified_sw_ucb) {
    // One draw per selection keeps the random stream aligned whatever branch is taken.
    const double u = uniform01(rng);
    if (u < config_.eps) return static_cast<std::size_t>(uniform_index(rng, config_.num_arms));
  }
  std::size_t best = 0;
  for (std::size_t a = 0; a < config_.num_arms; ++a) {
    if (std::isinf(score[a])) return a;
    if (score[a] > score[best]) best = a;
  }
  return best;
}

void BanditState::update(std::size_t arm, double reward) {
  if (arm >= config_.num_arms) throw InvalidArgument("bandit update: arm out of range");
  if (!std::isfinite(reward)) throw InvalidArgument("bandit update: non-finite reward");
  history_.push_back({arm, reward});
  if (history_.size() > config_.window) history_.pop_front();
  ++total_counts_[arm];
  total_sums_[arm] += reward;
  ++k_;
}

std::size_t BanditState::greedy_arm() const {
  std::vector<std::size_t> n;
  std::vector<double> mean;
  window_stats(n, mean);
  std::size_t best = config_.num_arms;
  for (std::size_t a = 0; a < config_.num_arms; ++a) {
    if (n[a] == 0) continue;
    if (best == config_.num_arms || mean[a] > mean[best]) best = a;
  }
  return best == config_.num_arms ? 0 : best;
}

namespace {
double arm_mean(const BanditSimConfig& sim, std::size_t step, std::size_t arm) {
  const bool swapped = sim.swap_at != 0 && step >= sim.swap_at;
  return sim.means[swapped ? sim.means.size() - 1 - arm : arm];
}
}  // namespace

std::vector<BanditSimStep> simulate_bandit(const BanditConfig& bandit, const BanditSimConfig& sim, Rng& rng) {
  if (sim.means.size() != bandit.num_arms) throw InvalidArgument("simulate_bandit: one mean per arm required");
  for (double m : sim.means)
    if (!(m >= 0.0 && m <= 1.0)) throw InvalidArgument("simulate_bandit: Bernoulli means must lie in [0, 1]");
  BanditState state(bandit);
  std::vector<BanditSimStep> trace;
  trace.reserve(sim.steps);
  for (std::size_t k = 0; k < sim.steps; ++k) {
    BanditSimStep s;
    s.step = k;
    s.arm = state.select_arm(rng, &s.scores);
    s.reward = uniform01(rng) < arm_mean(sim, k, s.arm) ? 1.0 : 0.0;
    state.update(s.arm, s.reward);
    trace.push_back(std::move(s));
  }
  return trace;
}

double best_arm_frequency(const std::vector<BanditSimStep>& trace, const BanditSimConfig& sim, std::size_t first,
                          std::size_t last) {
  last = std::min(last, trace.size());
  if (first >= last) throw InvalidArgument("best_arm_frequency: empty range");
  std::size_t hits = 0;
  for (std::size_t k = first; k < last; ++k) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < sim.means.size(); ++a)
      if (arm_mean(sim, k, a) > arm_mean(sim, k, best)) best = a;
    if (trace[k].arm == best) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(last - first);
}

void write_bandit_csv(std::ostream& out, const std::vector<BanditSimStep>& trace, std::size_t num_arms) {
  out << "step,arm,reward";
  for (std::size_t a = 0; a < num_arms; ++a) out << ",score_" << a;
  out << '\n';
  for (const auto& s : trace) {
    out << s.step << ',' << s.arm << ',' << csv::format(s.reward);
    for (double v : s.scores) out << ',' << csv::format(v);
    out << '\n';
  }
}

}  // namespace famrl
