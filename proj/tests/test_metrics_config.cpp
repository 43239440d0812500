#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "famrl/config.hpp"
#include "famrl/csv.hpp"
#include "famrl/errors.hpp"
#include "famrl/metrics.hpp"
#include "support.hpp"

using namespace famrl;
using testsupport::Gen;

TEST(Scores, HnsExamples) {
  EXPECT_EQ(hns({5.0, 5.0, 1.0}), 1.0);
  EXPECT_EQ(hns({1.0, 5.0, 1.0}), 0.0);
  // Skiing: an optimal policy's score against the human and random baselines.
  EXPECT_NEAR(hns({-3272.0, -4336.9, -17098.1}), 1.0834, 1e-3);
  EXPECT_NEAR(hns({-3272.0, -4336.9, -17098.1}), (-3272.0 + 17098.1) / (-4336.9 + 17098.1), 1e-15);
  EXPECT_THROW(hns({1.0, 2.0, 2.0}), UndefinedBaselineError);
  EXPECT_THROW(chns({1.0, 2.0, 2.0}), UndefinedBaselineError);
}

TEST(Scores, ChnsCaps) {
  EXPECT_EQ(chns({2.5, 1.0, 0.0}), 1.0);
  EXPECT_EQ(chns({-0.3, 1.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(chns({0.4, 1.0, 0.0}), 0.4);
}

TEST(Scores, ChnsInvariantUnderPositiveAffineMaps) {
  Gen g(1);
  for (int i = 0; i < 2000; ++i) {
    const ScoreTriple t{g.uniform(-100, 100), g.uniform(-100, 100), g.uniform(-100, 100)};
    if (t.human == t.random) continue;
    const double a = g.uniform(0.01, 50), b = g.uniform(-1000, 1000);
    const ScoreTriple u{a * t.agent + b, a * t.human + b, a * t.random + b};
    EXPECT_NEAR(chns(u), chns(t), 1e-9);
    const double c = chns(t);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
  }
}

TEST(WindowedMean, Examples) {
  EXPECT_TRUE(windowed_mean(std::vector<double>{}).empty());
  EXPECT_EQ(windowed_mean(std::vector<double>{4.0}), std::vector<double>{4.0});
  const std::vector<double> c(120, 2.5);
  for (double v : windowed_mean(c)) EXPECT_DOUBLE_EQ(v, 2.5);
  std::vector<double> step(50, 0.0);
  step.resize(100, 1.0);
  const auto m = windowed_mean(step);
  EXPECT_EQ(m.back(), 1.0);
  EXPECT_DOUBLE_EQ(m[74], 0.5);
  EXPECT_DOUBLE_EQ(windowed_mean(std::vector<double>{1, 2, 3}, 2)[2], 2.5);
  EXPECT_THROW(windowed_mean(step, 0), InvalidArgument);
}

TEST(WindowedMean, AgreesWithDirectSum) {
  Gen g(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(1 + g.index(200));
    for (auto& v : r) v = g.uniform(-10, 10);
    const std::size_t w = 1 + g.index(60);
    const auto m = windowed_mean(r, w);
    ASSERT_EQ(m.size(), r.size());
    double best = -INFINITY;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
      double s = 0;
      for (std::size_t k = lo; k <= i; ++k) s += r[k];
      EXPECT_NEAR(m[i], s / (i + 1 - lo), 1e-12);
      best = std::max(best, m[i]);
    }
    EXPECT_EQ(max_windowed_mean(r, w), best);
  }
  EXPECT_THROW(max_windowed_mean(std::vector<double>{}), InvalidArgument);
}

TEST(Scores, NormalizeFiles) {
  std::stringstream scores("game,score\nskiing,-3272\npong,21\n");
  std::stringstream base("game,human,random\npong,14.6,-20.7\nskiing,-4336.9,-17098.1\n");
  const auto rows = normalize_scores(scores, base);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].game, "skiing");
  EXPECT_NEAR(rows[0].hns, 1.0834, 1e-3);
  EXPECT_EQ(rows[0].chns, 1.0);
  EXPECT_NEAR(rows[1].hns, 41.7 / 35.3, 1e-12);

  std::stringstream out;
  write_normalized_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, 15), "game,hns,chns\ns");
  EXPECT_EQ(read_normalized_csv(out), rows);

  std::stringstream missing_s("game,score\ntennis,1\n"), missing_b("game,human,random\npong,1,0\n");
  EXPECT_THROW(normalize_scores(missing_s, missing_b), UndefinedBaselineError);
  std::stringstream bad_s("name,score\npong,1\n"), bad_b("game,human,random\npong,1,0\n");
  EXPECT_THROW(normalize_scores(bad_s, bad_b), SchemaViolation);
}

TEST(Csv, RoundTripProperty) {
  Gen g(3);
  std::vector<NormalizedScore> rows;
  for (int i = 0; i < 300; ++i) {
    const double scale = std::pow(10.0, g.uniform(-12, 12));
    rows.push_back({"g" + std::to_string(i), g.uniform(-1, 1) * scale, g.uniform()});
  }
  std::stringstream ss;
  write_normalized_csv(ss, rows);
  EXPECT_EQ(read_normalized_csv(ss), rows);
}

TEST(Csv, FormatAndParse) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 123456789.0})
    EXPECT_EQ(csv::parse_double(csv::format(v)), v);
  EXPECT_TRUE(std::isnan(csv::parse_double(csv::format(NAN))));
  EXPECT_ANY_THROW(csv::parse_double("1.5x"));
  EXPECT_ANY_THROW(csv::parse_double(""));
  EXPECT_EQ(csv::split(" a , b,c "), (std::vector<std::string>{"a", "b", "c"}));
  std::stringstream ragged("a,b\n1,2\n3\n");
  EXPECT_THROW(csv::read(ragged), SchemaViolation);
  std::stringstream comments("# note\nx,y\n\n1,2\n");
  const auto t = csv::read(comments);
  EXPECT_EQ(t.column("y"), 1u);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_THROW(t.column("z"), SchemaViolation);
}

// ---------------------------------------------------------------------------
// Config

TEST(Config, ParsesKeysAndComments) {
  std::stringstream in(
      "# comment\n"
      "seed = 7\n"
      "total_frames = 2e6   # trailing comment\n"
      "family_pairs = 0:0.99; 0.3:0.99\n"
      "coin_encoding = relative\n"
      "mode = threads\n"
      "optimizer = adam\n"
      "mix = identity\n"
      "transform = false\n"
      "lifelong_backend = rnd\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.total_frames, 2'000'000u);
  EXPECT_EQ(c.family_pairs, (std::vector<FamilyMember>{{0.0, 0.99}, {0.3, 0.99}}));
  EXPECT_EQ(c.coin.encoding, CoinEncoding::relative);
  EXPECT_EQ(c.mode, RunMode::multi_worker);
  EXPECT_EQ(c.learner.optimizer, OptimizerKind::adam);
  EXPECT_FALSE(c.values.transformed_mix);
  EXPECT_FALSE(c.values.transform);
  EXPECT_EQ(c.novelty.lifelong.backend, LifelongBackend::random_distillation);
  EXPECT_EQ(c.family().size(), 2u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, LongNameAliases) {
  std::stringstream in(
      "Retrace lambda = 0.8\n"
      "Bandit window size = 90\n"
      "Number of mixtures $N$ = 16\n"
      "Optimizer = AdamOptimizer\n"
      "Adam clip norm = 40\n"
      "R2D2 reward transformation = sign(x) * (sqrt(|x| + 1) - 1) + 0.001 * x\n"
      "Replay capacity = 5e6\n"
      "Importance sampling exponent = 0.0\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.values.retrace_lambda, 0.8);
  EXPECT_EQ(c.actor_bandit.window, 90u);
  EXPECT_EQ(c.schedule.num_policies, 16u);
  EXPECT_EQ(c.learner.optimizer, OptimizerKind::adam);
  EXPECT_TRUE(c.values.transform);
  EXPECT_EQ(c.replay.capacity, 5'000'000u);
  for (const auto& a : hyperparameter_aliases()) EXPECT_FALSE(a.name.empty());
}

TEST(Config, Errors) {
  const auto parse = [](const std::string& text) {
    std::stringstream in(text);
    return parse_config(in);
  };
  EXPECT_THROW(parse("no_such_key = 1\n"), ConfigError);
  EXPECT_THROW(parse("seed 4\n"), ConfigError);
  EXPECT_THROW(parse("seed = -1\n"), ConfigError);
  EXPECT_THROW(parse("seed = 1.5\n"), ConfigError);
  EXPECT_THROW(parse("mode = cluster\n"), ConfigError);
  EXPECT_THROW(parse("importance_sampling_exponent = 0.6\n"), ConfigError);
  EXPECT_THROW(parse("family_pairs = 0.3\n"), ConfigError);
  EXPECT_THROW(parse("intrinsic_rewards = maybe\n"), ConfigError);
  try {
    parse("seed = 1\n\nbogus = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/file.conf"), ConfigError);

  TrainConfig c;
  c.replay_period = c.trace_length;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.values.transform = false;
  EXPECT_THROW(c.validate(), ConfigError);  // transformed mix needs transformed losses
  c = TrainConfig{};
  c.family_pairs = {{0.0, 1.0}};
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(TrainConfig{}.validate());
}

TEST(Config, WriteThenParseRoundTrips) {
  TrainConfig c;
  c.seed = 99;
  c.family_pairs = {{0.0, 0.99}, {0.25, 0.95}};
  c.coin.encoding = CoinEncoding::relative;
  c.values.retrace_lambda = 1.0 / 3.0;
  c.learner.optimizer = OptimizerKind::adam;
  c.novelty.enabled = false;
  std::stringstream a;
  write_config(a, c);
  std::stringstream in(a.str());
  const auto back = parse_config(in);
  std::stringstream b;
  write_config(b, back);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.values.retrace_lambda, c.values.retrace_lambda);
  EXPECT_EQ(back.family_pairs, c.family_pairs);
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"random_coin.conf", "random_mdp.conf", "reference.conf"}) {
    const auto c = load_config(std::string(FAMRL_CONFIG_DIR) + "/" + name);
    EXPECT_NO_THROW(c.validate()) << name;
  }
}
