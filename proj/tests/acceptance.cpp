// Acceptance run: one PASS/FAIL line per criterion, exit status 0 when every
// failure is on the known list below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "famrl/actor.hpp"
#include "famrl/bandit.hpp"
#include "famrl/bellman.hpp"
#include "famrl/config.hpp"
#include "famrl/decomposition.hpp"
#include "famrl/environments.hpp"
#include "famrl/evaluator.hpp"
#include "famrl/family.hpp"
#include "famrl/harness.hpp"
#include "famrl/metrics.hpp"
#include "famrl/replay.hpp"
#include "famrl/retrace.hpp"
#include "support.hpp"

using namespace famrl;
using testsupport::Gen;

namespace {

// 6b asks for 0.8 best-arm frequency with eps = 0.5 on two arms. Half the
// pulls are uniform, so even a perfect greedy part caps it at 0.75.
const std::set<std::string> kExpectedFailures = {"6b"};

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Same five-state suite for criteria 1 and 4.
std::vector<TabularMdp> equivalence_suite() {
  Gen g(1001);
  std::vector<TabularMdp> out;
  for (int i = 0; i < 50; ++i) out.push_back(g.mdp(5, 3));
  return out;
}
const std::vector<double> kBetas = {0.0, 0.1, 0.3, 1.0, 5.0};

Outcome decomposition_equivalence() {
  double plain = 0.0, squashed = 0.0;
  for (const auto& m : equivalence_suite())
    for (double beta : kBetas) {
      EquivalenceOptions opt;
      opt.iters = 200;
      plain = std::max(plain, equivalence_report(m, beta, 0.9, opt).max_deviation);
      opt.transform = ValueTransform::squash();
      squashed = std::max(squashed, equivalence_report(m, beta, 0.9, opt).max_deviation);
    }
  return {plain <= 1e-10 && squashed <= 1e-8, "max deviation " + fmt(plain) + " plain, " + fmt(squashed) + " transformed"};
}

Outcome retrace_fixed_point() {
  Gen g(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = g.mdp(6, 3);
    const auto mu = g.policy(6, 3, 0.01), pi = g.policy(6, 3);
    const QTable qpi = testsupport::policy_value(m, pi, 0.9);
    const auto r = retrace_operator_exact(m, mu, pi, qpi, {0.95, 0.9});
    worst = std::max(worst, r.q.max_abs_diff(qpi));
  }
  return {worst <= 1e-9, "max |TQ - Q| " + fmt(worst)};
}

Outcome retrace_control() {
  Gen g(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = g.mdp(5, 3);
    const QTable q = retrace_control_scheme(m, QTable(5, 3), {0.95, 0.9});
    worst = std::max(worst, testsupport::sup_diff(q, testsupport::optimal_value(m, 0.9)));
  }
  return {worst <= 1e-6, "max |Q - Q*| " + fmt(worst)};
}

Outcome retrace_decomposition() {
  double worst = 0.0;
  for (const auto& m : equivalence_suite())
    for (double beta : kBetas) {
      std::vector<QTable> mixed, reference;
      DecomposedRetraceOptions dopt;
      dopt.iters = 200;
      dopt.on_iterate = [&](std::size_t, const QTable&, const QTable&, const QTable& mix) { mixed.push_back(mix); };
      retrace_decomposed_scheme(m, QTable(5, 3), QTable(5, 3), beta, {0.95, 0.9}, dopt);
      RetraceControlOptions copt;
      copt.iters = 200;
      copt.reward = RewardSelect::mixed(beta);
      copt.on_iterate = [&](std::size_t, const QTable& q) { reference.push_back(q); };
      retrace_control_scheme(m, QTable(5, 3), {0.95, 0.9}, copt);
      if (mixed.size() != reference.size()) return {false, "iterate counts differ"};
      for (std::size_t k = 0; k < mixed.size(); ++k) worst = std::max(worst, mixed[k].max_abs_diff(reference[k]));
    }
  return {worst <= 1e-10, "max deviation " + fmt(worst)};
}

TransitionSequence on_policy_rollout(const TabularMdp& m, const std::vector<std::size_t>& policy, std::size_t x0,
                                     std::size_t a0) {
  TransitionSequence seq;
  std::size_t x = x0, a = a0;
  for (;;) {
    Transition t;
    t.observation = x;
    t.action = a;
    t.extrinsic_reward = m.reward_extrinsic(x, a);
    t.intrinsic_reward = m.reward_intrinsic(x, a);
    if (!seq.steps.empty()) {
      t.prev_action = seq.steps.back().action;
      t.prev_extrinsic_reward = seq.steps.back().extrinsic_reward;
      t.prev_intrinsic_reward = seq.steps.back().intrinsic_reward;
    }
    const std::size_t y = m.successors(x, a)[0].state;
    t.next_observation = y;
    t.terminal = m.is_terminal(y);
    seq.steps.push_back(t);
    if (t.terminal) break;
    x = y;
    a = policy[y];
  }
  seq.valid_length = seq.steps.size();
  return seq;
}

Outcome sampled_targets() {
  Gen g(1005);
  double target_err = 0.0, grad_err = 0.0;
  for (const bool transformed : {false, true}) {
    const OptionalTransform tf = transformed ? OptionalTransform(ValueTransform::squash()) : std::nullopt;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t S = 8, A = 3;
      const auto m = g.acyclic_chain(S, A);
      const auto acts = g.actions(S, A);
      const auto pi = StochasticPolicy::deterministic(acts, A);
      QTable q = g.table(S, A, -1, 1);
      for (std::size_t a = 0; a < A; ++a) q(S - 1, a) = 0.0;
      const TraceConfig cfg{g.uniform(0.5, 1.0), 0.9};
      const QTable exact = retrace_operator_exact(m, pi, pi, q, cfg, 0, RewardSelect::extrinsic(), tf).q;
      const std::vector<TransitionSequence> batch = {on_policy_rollout(m, acts, g.index(S - 1), g.index(A)),
                                                     on_policy_rollout(m, acts, 0, 0)};
      const TablePolicy tp(pi);
      const auto targets = retrace_targets_sampled(batch, q, tp, cfg, tf);
      for (std::size_t b = 0; b < batch.size(); ++b)
        for (std::size_t s = 0; s < batch[b].valid_length; ++s) {
          const auto& t = batch[b].steps[s];
          target_err = std::max(target_err, std::abs(targets.sequences[b].target[s] - exact(t.observation, t.action)));
        }
      // Central differences on the loss.
      const QTable online = g.table(S, A, -2, 2);
      const QTable grad = retrace_loss_gradient(batch, online, targets);
      const double h = 1e-5;
      for (std::size_t i = 0; i < online.size(); ++i) {
        QTable up = online, down = online;
        up.values()[i] += h;
        down.values()[i] -= h;
        const double fd = (retrace_loss(batch, up, targets).loss - retrace_loss(batch, down, targets).loss) / (2 * h);
        const double an = grad.values()[i];
        grad_err = std::max(grad_err, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
    }
  }
  return {target_err <= 1e-9 && grad_err <= 1e-6,
          "target error " + fmt(target_err) + ", gradient relative error " + fmt(grad_err)};
}

double mean_best_arm_frequency(const BanditConfig& cfg, const BanditSimConfig& sim, std::size_t from,
                               std::size_t to, std::uint64_t stream) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, stream);
    total += best_arm_frequency(simulate_bandit(cfg, sim, rng), sim, from, to);
  }
  return total / 20.0;
}

Outcome bandit_stationary() {
  const double f = mean_best_arm_frequency({3, 3600, 0.01, 1.0}, {{0.9, 0.5, 0.1}, 10'000, 0}, 9000, 10'000, 601);
  return {f >= 0.9, "best-arm frequency " + fmt(f)};
}

Outcome bandit_switching() {
  const double f = mean_best_arm_frequency({2, 160, 0.5, 1.0}, {{0.9, 0.1}, 10'000, 5000}, 6000, 10'000, 602);
  return {f >= 0.8, "best-arm frequency " + fmt(f) + " (ceiling 0.75 at eps 0.5)"};
}

Outcome coin_dichotomy() {
  const auto base = load_config(std::string(FAMRL_CONFIG_DIR) + "/random_coin.conf");
  std::string detail;
  bool pass = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto cfg = base;
    cfg.seed = seed;
    const auto r = run_training(cfg);
    const double exploit = r.final_arm_returns.at(0), explore = r.final_arm_returns.at(1);
    pass = pass && exploit >= 0.95 && explore <= 0.2 && r.frames <= 2'000'000;
    detail += (seed > 1 ? "; " : "") + std::string("seed ") + std::to_string(seed) + ": " + fmt(exploit) + " / " +
              fmt(explore);
  }
  return {pass, "exploit / explore returns " + detail};
}

double sigma(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Outcome schedules() {
  const auto f = build_family();
  bool pass = f.size() == 32 && f.beta(0) == 0.0 && f.beta(31) == 0.3 && f.gamma(0) == 0.9999 && f.gamma(7) == 0.997;
  double worst = 0.0;
  for (std::size_t j = 0; j < 32; ++j) {
    const double b = j == 0 ? 0.0 : j == 31 ? 0.3 : 0.3 * sigma(10.0 * (2.0 * j - 30.0) / 30.0);
    double g;
    if (j == 0) g = 0.9999;
    else if (j <= 6) g = 0.997 + (0.9999 - 0.997) * sigma(10.0 * (2.0 * j - 6.0) / 6.0);
    else if (j == 7) g = 0.997;
    else g = 1.0 - std::exp((23.0 * std::log(1.0 - 0.997) + (j - 8.0) * std::log(1.0 - 0.99)) / 23.0);
    worst = std::max({worst, std::abs(f.beta(j) - b), std::abs(f.gamma(j) - g)});
  }
  pass = pass && worst <= 1e-12;
  return {pass, "max schedule deviation " + fmt(worst)};
}

Outcome protocol() {
  std::vector<std::string> failures;
  // Evaluator alternation, observed on a running evaluator.
  {
    const CoinConfig cc{4, 30, CoinEncoding::relative};
    RandomCoinEnv probe(cc);
    auto family = std::make_shared<const PolicyFamily>(std::vector<FamilyMember>{{0.0, 0.99}, {0.3, 0.99}});
    auto tables = std::make_shared<const ValueTables>(2, probe.num_states(), 4);
    Evaluator ev({}, std::make_unique<RandomCoinEnv>(cc), family, ValueConfig{}, {2, 3600, 0.01, 1.0},
                 [tables] { return tables; }, 3);
    std::string pattern;
    for (int e = 0; e < 20; ++e)
      pattern += ev.run_episode().phase == EvaluatorPhase::training ? 'T' : 'E';
    if (pattern != "TTTTTEEEEETTTTTEEEEE") failures.push_back("alternation " + pattern);
  }
  // FIFO eviction.
  {
    SequenceReplay r({3, 1, 0.9});
    TransitionSequence seq;
    seq.steps.resize(1);
    seq.valid_length = 1;
    for (int i = 0; i < 5; ++i) r.insert(seq, 1.0);
    if (r.size() != 3 || r.contains(0) || r.contains(1) || !r.contains(2) || !r.contains(4))
      failures.push_back("eviction");
  }
  if (actor_epsilon(0, 8) != 0.4 || std::abs(actor_epsilon(7, 8) - std::pow(0.4, 9)) > 1e-15)
    failures.push_back("epsilon ladder");
  const std::vector<double> td = {0.0, 0.0, 10.0};
  if (std::abs(sequence_priority(td, 3, 0.9) - 9.3333) > 1e-4) failures.push_back("priority");
  // Single-process reruns must be bit-identical.
  {
    TrainConfig c;
    c.seed = 42;
    c.coin = {5, 50, CoinEncoding::relative};
    c.family_pairs = {{0.0, 0.99}, {0.3, 0.99}};
    c.total_frames = 8000;
    c.metrics_interval = 1000;
    c.num_actors = 3;
    c.trace_length = 10;
    c.replay_period = 5;
    c.learner.batch_size = 8;
    c.replay.min_to_start = 8;
    c.final_eval_episodes = 5;
    const auto a = run_training(c), b = run_training(c);
    std::ostringstream ca, cb;
    write_metrics_csv(ca, a.metrics);
    write_metrics_csv(cb, b.metrics);
    if (ca.str() != cb.str() || !(*a.tables == *b.tables)) failures.push_back("rerun differs");
  }
  std::string detail = failures.empty() ? "alternation, eviction, ladder, priority, reruns" : "failed:";
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty(), detail};
}

Outcome metric_formulas() {
  const double ski = hns({-3272.0, -4336.9, -17098.1});
  const bool pass = std::abs(ski - 1.0834) <= 1e-3 && hns({3, 3, 1}) == 1.0 && hns({1, 3, 1}) == 0.0 &&
                    chns({2.5, 1, 0}) == 1.0 && chns({-0.3, 1, 0}) == 0.0 && std::abs(chns({0.4, 1, 0}) - 0.4) < 1e-15;
  return {pass, "skiing hns " + fmt(ski)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1", "decomposition equivalence", 10, decomposition_equivalence},
      {"2", "retrace fixed point", 5, retrace_fixed_point},
      {"3", "retrace control convergence", 30, retrace_control},
      {"4", "retrace decomposition", 30, retrace_decomposition},
      {"5", "sampled-target consistency", 60, sampled_targets},
      {"6a", "sliding-window bandit, stationary", 10, bandit_stationary},
      {"6b", "sliding-window bandit, switching", 10, bandit_switching},
      {"7", "random-coin policy dichotomy", 600, coin_dichotomy},
      {"8", "schedule fidelity", 1, schedules},
      {"9", "protocol conformance", 60, protocol},
      {"10", "metric formulas", 1, metric_formulas},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += ", over the " + fmt(c.budget_s) + " s budget";
    }
    const bool expected_fail = kExpectedFailures.count(c.id) > 0;
    std::printf("%s criterion %s (%s): %s [%.2f s]%s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                o.detail.c_str(), secs, !o.pass && expected_fail ? " (known)" : "");
    std::fflush(stdout);
    if (!o.pass && !expected_fail) ++unexpected;
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
