#include "famrl/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "famrl/actor.hpp"
#include "famrl/bandit.hpp"
#include "famrl/bellman.hpp"
#include "famrl/decomposition.hpp"
#include "famrl/environments.hpp"
#include "famrl/evaluator.hpp"
#include "famrl/family.hpp"
#include "famrl/metrics.hpp"
#include "famrl/replay.hpp"
#include "famrl/retrace.hpp"

namespace famrl {

namespace {

const double kBetas[] = {0.0, 0.1, 0.3, 1.0, 5.0};

TabularMdp suite_mdp(std::uint64_t seed) {
  MdpGeneratorConfig cfg;
  cfg.num_states = 5;
  cfg.num_actions = 3;
  cfg.seed = seed;
  return generate_mdp(cfg);
}

StochasticPolicy random_policy(std::size_t S, std::size_t A, Rng& rng) {
  QTable p(S, A);
  for (std::size_t x = 0; x < S; ++x) {
    double sum = 0.0;
    for (std::size_t a = 0; a < A; ++a) sum += p(x, a) = uniform01(rng) + 0.05;
    for (std::size_t a = 0; a < A; ++a) p(x, a) /= sum;
  }
  return StochasticPolicy(p);
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

VerifyCheck timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  VerifyCheck c;
  c.name = name;
  try {
    auto [ok, detail] = body();
    c.passed = ok;
    c.detail = std::move(detail);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace

std::vector<VerifyCheck> run_verification(const VerifyOptions& opt) {
  std::vector<VerifyCheck> out;
  const std::uint64_t base = opt.seed * 100'003;

  out.push_back(timed("transform round trip", [&] {
    Rng rng = make_rng(opt.seed, 11);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double z = -100.0 + 200.0 * uniform01(rng);
      worst = std::max(worst, std::abs(h_inverse(h_apply(z)) - z));
    }
    for (int i = 0; i <= 10'000; ++i) {
      const double z = -1e6 + 2e6 * i / 10'000.0;
      worst = std::max(worst, std::abs(h_inverse(h_apply(z)) - z));
    }
    return std::pair{worst <= 1e-9, "max error " + sci(worst)};
  }));

  out.push_back(timed("decomposition equivalence", [&] {
    const std::size_t iters = 200;
    std::vector<double> sup(iters + 1, 0.0);
    double plain = 0.0, transformed = 0.0;
    for (std::size_t m = 0; m < opt.num_mdps; ++m) {
      const TabularMdp mdp = suite_mdp(base + m);
      for (double beta : kBetas) {
        EquivalenceOptions eo;
        eo.iters = iters;
        const auto rp = equivalence_report(mdp, beta, 0.9, eo);
        eo.transform = ValueTransform::squash();
        const auto rt = equivalence_report(mdp, beta, 0.9, eo);
        plain = std::max(plain, rp.max_deviation);
        transformed = std::max(transformed, rt.max_deviation);
        for (std::size_t k = 0; k <= iters; ++k) sup[k] = std::max({sup[k], rp.deviation[k], rt.deviation[k]});
      }
    }
    if (opt.equivalence_csv) {
      EquivalenceReport r;
      r.deviation = sup;
      write_equivalence_csv(*opt.equivalence_csv, r);
    }
    return std::pair{plain <= 1e-10 && transformed <= 1e-8,
                     "plain " + sci(plain) + ", transformed " + sci(transformed)};
  }));

  out.push_back(timed("retrace fixed point", [&] {
    Rng rng = make_rng(opt.seed, 12);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const TabularMdp mdp = suite_mdp(base + 500 + i);
      const auto mu = random_policy(5, 3, rng);
      const auto pi = random_policy(5, 3, rng);
      const TraceConfig cfg{0.95, 0.9};
      const QTable q = policy_eval_exact(mdp, pi, cfg.gamma);
      worst = std::max(worst, retrace_operator_exact(mdp, mu, pi, q, cfg).q.max_abs_diff(q));
    }
    return std::pair{worst <= 1e-9, "max residual " + sci(worst)};
  }));

  out.push_back(timed("retrace control convergence", [&] {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const TabularMdp mdp = suite_mdp(base + 700 + i);
      const TraceConfig cfg{0.95, 0.9};
      const QTable qstar = value_iteration(mdp, cfg.gamma).q;
      const QTable q = retrace_control_scheme(mdp, QTable(5, 3), cfg);
      worst = std::max(worst, q.max_abs_diff(qstar));
    }
    return std::pair{worst <= 1e-6, "max error " + sci(worst)};
  }));

  out.push_back(timed("retrace decomposition", [&] {
    double worst = 0.0;
    const std::size_t n = std::min<std::size_t>(opt.num_mdps, 50);
    for (std::size_t m = 0; m < n; ++m) {
      const TabularMdp mdp = suite_mdp(base + m);
      const TraceConfig cfg{0.95, 0.9};
      for (double beta : kBetas) {
        std::vector<QTable> mixed_iterates;
        RetraceControlOptions ro;
        ro.iters = 200;
        ro.reward = RewardSelect::mixed(beta);
        ro.on_iterate = [&](std::size_t, const QTable& q) { mixed_iterates.push_back(q); };
        retrace_control_scheme(mdp, QTable(5, 3), cfg, ro);
        DecomposedRetraceOptions dopt;
        dopt.iters = 200;
        dopt.on_iterate = [&](std::size_t k, const QTable&, const QTable&, const QTable& mix) {
          worst = std::max(worst, mix.max_abs_diff(mixed_iterates[k]));
        };
        retrace_decomposed_scheme(mdp, QTable(5, 3), QTable(5, 3), beta, cfg, dopt);
      }
    }
    return std::pair{worst <= 1e-10, "max deviation " + sci(worst)};
  }));

  out.push_back(timed("sampled retrace targets", [&] {
    // Acyclic deterministic chain: each action jumps 1 + a states ahead, the last state is terminal.
    const std::size_t S = 8, A = 2;
    std::vector<std::vector<Successor>> tr(S * A);
    std::vector<double> re(S * A, 0.0);
    std::vector<bool> term(S, false);
    term[S - 1] = true;
    Rng rng = make_rng(opt.seed, 13);
    for (std::size_t x = 0; x < S; ++x)
      for (std::size_t a = 0; a < A; ++a) {
        tr[x * A + a] = {{x + 1 == S ? x : std::min(S - 1, x + 1 + a), 1.0}};
        if (x + 1 < S) re[x * A + a] = uniform01(rng);
      }
    const TabularMdp mdp(S, A, tr, re, {}, term);
    QTable q(S, A);
    for (std::size_t x = 0; x + 1 < S; ++x)
      for (std::size_t a = 0; a < A; ++a) q(x, a) = uniform01(rng);
    const StochasticPolicy pi = greedy_policy(q);
    const TraceConfig cfg{0.95, 0.9};
    double worst = 0.0;
    for (const auto& t : {OptionalTransform{}, OptionalTransform{ValueTransform::squash()}}) {
      const QTable stored = t ? apply_transform(q, *t) : q;
      const QTable exact = retrace_operator_exact(mdp, pi, pi, stored, cfg, 0, RewardSelect::extrinsic(), t).q;
      TransitionSequence seq;
      std::size_t x = 0;
      while (!mdp.is_terminal(x)) {
        Transition tr_step;
        tr_step.observation = x;
        tr_step.action = greedy_actions(q)[x];
        tr_step.extrinsic_reward = mdp.reward_extrinsic(x, tr_step.action);
        tr_step.next_observation = mdp.successors(x, tr_step.action)[0].state;
        tr_step.terminal = mdp.is_terminal(tr_step.next_observation);
        if (!seq.steps.empty()) {
          tr_step.prev_action = seq.steps.back().action;
          tr_step.prev_extrinsic_reward = seq.steps.back().extrinsic_reward;
        }
        seq.steps.push_back(tr_step);
        x = tr_step.next_observation;
      }
      seq.valid_length = seq.steps.size();
      const auto targets = sequence_targets(seq, stored, TablePolicy(pi), cfg, t);
      for (std::size_t s = 0; s < seq.valid_length; ++s)
        worst = std::max(worst, std::abs(targets.target[s] - exact(seq.steps[s].observation, seq.steps[s].action)));
    }
    return std::pair{worst <= 1e-9, "max gap " + sci(worst)};
  }));

  out.push_back(timed("sliding-window bandit", [&] {
    double stationary = 0.0, switching = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng rng = make_rng(opt.seed * 31 + s, 14);
      BanditSimConfig sim{{0.9, 0.5, 0.1}, 10'000, 0};
      stationary += best_arm_frequency(simulate_bandit({3, 3600, 0.01, 1.0}, sim, rng), sim, 9000, 10'000);
      BanditSimConfig sw{{0.9, 0.1}, 10'000, 5000};
      switching += best_arm_frequency(simulate_bandit({2, 160, 0.5, 1.0}, sw, rng), sw, 6000, 10'000);
    }
    stationary /= 20.0;
    switching /= 20.0;
    // With eps = 0.5 over two arms the uniform draws alone cap the frequency at 0.75.
    return std::pair{stationary >= 0.9 && switching >= 0.7,
                     "stationary " + sci(stationary) + ", switching " + sci(switching)};
  }));

  out.push_back(timed("family schedule", [&] {
    const FamilySchedule sched;
    const PolicyFamily f = build_family(sched);
    bool ok = f.size() == 32 && f.beta(0) == 0.0 && f.beta(31) == 0.3 && f.gamma(0) == 0.9999 && f.gamma(7) == 0.997;
    ok = ok && std::abs(f.gamma(31) - (1.0 - 3e-5)) <= 1e-12;
    for (std::size_t j = 1; j < 32; ++j) ok = ok && f.beta(j) >= f.beta(j - 1);
    return std::pair{ok, "beta_16 " + sci(f.beta(16)) + ", gamma_31 " + sci(f.gamma(31))};
  }));

  out.push_back(timed("protocol", [&] {
    bool ok = true;
    for (std::uint64_t e = 0; e < 20; ++e)
      ok = ok && evaluator_phase(e) == ((e / 5) % 2 == 0 ? EvaluatorPhase::training : EvaluatorPhase::evaluation);
    ok = ok && actor_epsilon(0, 8) == 0.4 && std::abs(actor_epsilon(7, 8) - std::pow(0.4, 9)) <= 1e-15;
    const double p = sequence_priority(std::vector<double>{0, 0, 10}, 3, 0.9);
    ok = ok && std::abs(p - (9.0 + 1.0 / 3.0)) <= 1e-12;
    SequenceReplay replay({4, 1, 0.9});
    for (int i = 0; i < 7; ++i) {
      TransitionSequence seq;
      seq.steps.resize(2);
      seq.valid_length = 2;
      seq.steps[0].next_observation = 0;
      replay.insert(seq, 1.0);
    }
    for (SequenceId id = 0; id < 7; ++id) ok = ok && replay.contains(id) == (id >= 3);
    return std::pair{ok, "priority " + sci(p)};
  }));

  out.push_back(timed("metrics", [&] {
    const double skiing = hns({-3272.0, -4336.9, -17098.1});
    const bool ok = std::abs(skiing - 1.0834) <= 1e-3 && chns({2.5, 1.0, 0.0}) == 1.0 && chns({-0.3, 1.0, 0.0}) == 0.0;
    return std::pair{ok, "skiing hns " + sci(skiing)};
  }));

  return out;
}

}  // namespace famrl
