#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "famrl/bandit.hpp"
#include "famrl/csv.hpp"
#include "famrl/errors.hpp"
#include "support.hpp"

using namespace famrl;
using testsupport::Gen;

TEST(Bandit, RoundRobinStart) {
  BanditState b({5, 160, 0.5, 1.0});
  Rng rng = make_rng(1);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(b.select_arm(rng), k);
    b.update(k, 0.0);
  }
}

TEST(Bandit, DominantMeanWins) {
  BanditState b({3, 160, 0.0, 1.0});
  Rng rng = make_rng(2);
  for (int rep = 0; rep < 4; ++rep)
    for (std::size_t a = 0; a < 3; ++a) b.update(a, a == 1 ? 1.0 : 0.0);
  EXPECT_EQ(b.select_arm(rng), 1u);
}

TEST(Bandit, HandTracedWindow) {
  BanditState b({2, 2, 0.0, 1.0});
  b.update(0, 1.0);
  b.update(1, 0.0);
  b.update(0, 5.0);
  ASSERT_EQ(b.history().size(), 2u);
  EXPECT_EQ(b.counts(), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(b.means()[0], 5.0);
  EXPECT_EQ(b.steps(), 3u);
}

TEST(Bandit, ZeroCountArmIsForced) {
  BanditState b({2, 3, 0.0, 1.0});
  b.update(0, 0.0);
  b.update(1, 0.0);
  b.update(0, 1.0);
  b.update(0, 1.0);
  b.update(0, 1.0);  // arm 1 slid out of the window
  Rng rng = make_rng(3);
  EXPECT_EQ(b.counts()[1], 0u);
  EXPECT_TRUE(std::isinf(b.scores()[1]));
  EXPECT_EQ(b.select_arm(rng), 1u);
  EXPECT_EQ(b.greedy_arm(), 0u);  // greedy skips empty arms
}

TEST(Bandit, CountInvariant) {
  Gen g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t N = 1 + g.index(6), tau = 1 + g.index(30);
    BanditState b({N, tau, g.uniform(), 1.0});
    Rng rng = make_rng(trial);
    for (std::size_t k = 1; k <= 100; ++k) {
      b.update(b.select_arm(rng), g.uniform());
      const auto n = b.counts();
      EXPECT_EQ(std::accumulate(n.begin(), n.end(), std::size_t{0}), std::min(k, tau));
      EXPECT_LE(b.history().size(), tau);
    }
  }
}

TEST(Bandit, WindowDiscipline) {
  // Statistics after a long prefix equal those of a fresh bandit fed only the last tau pulls.
  Gen g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t tau = 1 + g.index(40);
    BanditState full({4, tau, 0.5, 1.0});
    std::vector<ArmPull> pulls;
    const std::size_t len = tau + 1 + g.index(100);
    for (std::size_t k = 0; k < len; ++k) pulls.push_back({g.index(4), g.uniform(-1, 1)});
    for (const auto& p : pulls) full.update(p.arm, p.reward);
    BanditState tail({4, tau, 0.5, 1.0});
    for (std::size_t k = len - tau; k < len; ++k) tail.update(pulls[k].arm, pulls[k].reward);
    EXPECT_EQ(full.counts(), tail.counts());
    EXPECT_EQ(full.means(), tail.means());
    EXPECT_EQ(full.history(), tail.history());
  }
}

TEST(Bandit, RewardScaleWithBonus) {
  Gen g(6);
  for (int trial = 0; trial < 20; ++trial) {
    const double c = g.uniform(0.1, 10.0);
    BanditState a({3, 50, 0.3, 1.0}), b({3, 50, 0.3, c});
    Rng ra = make_rng(trial), rb = make_rng(trial);
    for (int k = 0; k < 200; ++k) {
      const std::size_t x = a.select_arm(ra), y = b.select_arm(rb);
      ASSERT_EQ(x, y);
      const double r = g.uniform();
      a.update(x, r);
      b.update(y, c * r);
    }
  }
}

TEST(Bandit, FullExplorationIsUniform) {
  const std::size_t N = 4;
  BanditState b({N, 100, 1.0, 1.0});
  for (std::size_t a = 0; a < N; ++a) b.update(a, a == 0 ? 1.0 : 0.0);
  Rng rng = make_rng(7);
  std::vector<std::size_t> hits(N, 0);
  const std::size_t draws = 100'000;
  for (std::size_t i = 0; i < draws; ++i) ++hits[b.select_arm(rng)];
  const double p = 1.0 / N, sigma = std::sqrt(draws * p * (1 - p));
  for (auto h : hits) EXPECT_LE(std::abs(static_cast<double>(h) - draws * p), 3 * sigma);
}

TEST(Bandit, StationaryThreeArm) {
  const BanditSimConfig sim{{0.9, 0.5, 0.1}, 10'000, 0};
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, 77);
    const auto trace = simulate_bandit({3, 3600, 0.01, 1.0}, sim, rng);
    total += best_arm_frequency(trace, sim, 9000, 10'000);
  }
  EXPECT_GE(total / 20, 0.9);
}

TEST(Bandit, SwitchingTwoArmCapped) {
  // With two arms and eps = 0.5 half of all pulls are uniform, so the best
  // arm frequency is at most 0.5 + 0.25. The run should sit near that cap.
  const BanditSimConfig sim{{0.9, 0.1}, 10'000, 5000};
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, 78);
    const auto trace = simulate_bandit({2, 160, 0.5, 1.0}, sim, rng);
    total += best_arm_frequency(trace, sim, 6000, 10'000);
  }
  const double mean = total / 20;
  EXPECT_GE(mean, 0.7);
  EXPECT_LE(mean, 0.76);
}

TEST(Bandit, SwitchingRecoversWithSmallEpsilon) {
  const BanditSimConfig sim{{0.9, 0.1}, 10'000, 5000};
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, 79);
    const auto trace = simulate_bandit({2, 160, 0.1, 1.0}, sim, rng);
    total += best_arm_frequency(trace, sim, 6000, 10'000);
  }
  EXPECT_GE(total / 20, 0.8);
}

TEST(Bandit, ClassicRulesRun) {
  const BanditSimConfig sim{{0.2, 0.8}, 3000, 0};
  for (auto rule : {BanditRule::ucb1, BanditRule::sliding_window_ucb}) {
    Rng rng = make_rng(8);
    BanditConfig cfg{2, 500, 0.0, 1.0, rule};
    const auto trace = simulate_bandit(cfg, sim, rng);
    EXPECT_GE(best_arm_frequency(trace, sim, 2000, 3000), 0.8);
  }
}

TEST(Bandit, Validation) {
  EXPECT_THROW(BanditState({0, 10, 0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(BanditState({2, 0, 0.1, 1.0}), InvalidArgument);
  EXPECT_THROW(BanditState({2, 10, 1.5, 1.0}), InvalidArgument);
  BanditState b({2, 10, 0.1, 1.0});
  EXPECT_THROW(b.update(2, 0.0), InvalidArgument);
}

TEST(Bandit, CsvLayout) {
  const BanditSimConfig sim{{0.5, 0.5, 0.5}, 20, 0};
  Rng rng = make_rng(9);
  const auto trace = simulate_bandit({3, 10, 0.5, 1.0}, sim, rng);
  std::stringstream ss;
  write_bandit_csv(ss, trace, 3);
  const auto t = csv::read(ss);
  EXPECT_EQ(t.header, (std::vector<std::string>{"step", "arm", "reward", "score_0", "score_1", "score_2"}));
  EXPECT_EQ(t.rows.size(), 20u);
}

TEST(Bandit, Defaults) {
  const auto a = actor_bandit_config(4), e = evaluator_bandit_config(4);
  EXPECT_EQ(a.window, 160u);
  EXPECT_EQ(a.eps, 0.5);
  EXPECT_EQ(e.window, 3600u);
  EXPECT_EQ(e.eps, 0.01);
  EXPECT_EQ(a.bonus, 1.0);
}
