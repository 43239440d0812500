// famrl: command-line front end for training runs, verification suites,
// bandit simulations, family schedules and score normalisation.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "famrl/bandit.hpp"
#include "famrl/config.hpp"
#include "famrl/csv.hpp"
#include "famrl/errors.hpp"
#include "famrl/family.hpp"
#include "famrl/harness.hpp"
#include "famrl/metrics.hpp"
#include "famrl/verify.hpp"

namespace {

/// Output stream for "-" (stdout) or a file path.
std::ostream& open_output(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
  if (path.empty() || path == "-") return std::cout;
  holder = std::make_unique<std::ofstream>(path);
  if (!*holder) throw famrl::ConfigError("cannot write '" + path + "'");
  return *holder;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw famrl::ConfigError("cannot read '" + path + "'");
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"famrl: tabular agent with a family of exploration policies"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "run the actor/learner/replay harness");
  std::string config_path;
  std::uint64_t seed = 0;
  std::string metrics_out = "metrics.csv";
  bool print_config = false;
  std::vector<std::string> overrides;
  train->add_option("--config", config_path, "key = value config file");
  train->add_option("--seed", seed, "random seed")->required();
  train->add_option("--out", metrics_out, "metrics CSV path ('-' for stdout)");
  train->add_option("--set", overrides, "extra 'key=value' settings applied after the file");
  train->add_flag("--print-config", print_config, "print the effective config and exit");

  // verify
  auto* verify = app.add_subcommand("verify", "run the operator and protocol verification suites");
  std::size_t num_mdps = 50;
  std::uint64_t verify_seed = 0;
  std::string equivalence_out;
  verify->add_option("--mdps", num_mdps, "random MDPs per equivalence suite");
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--equivalence-csv", equivalence_out, "write iteration,deviation rows here");

  // bandit-sim
  auto* bandit = app.add_subcommand("bandit-sim", "simulate a Bernoulli bandit under a meta-controller rule");
  std::vector<double> means{0.9, 0.5, 0.1};
  std::size_t steps = 10'000, window = 3600, swap_at = 0;
  double eps = 0.01, bonus = 1.0;
  std::uint64_t bandit_seed = 0;
  std::string rule = "simplified";
  std::string bandit_out = "-";
  bandit->add_option("--means", means, "Bernoulli mean per arm");
  bandit->add_option("--steps", steps);
  bandit->add_option("--window", window);
  bandit->add_option("--eps", eps);
  bandit->add_option("--bonus", bonus);
  bandit->add_option("--swap-at", swap_at, "reverse the arm means from this step (0 = never)");
  bandit->add_option("--seed", bandit_seed);
  bandit->add_option("--rule", rule, "simplified | ucb1 | sw-ucb")
      ->check(CLI::IsMember({"simplified", "ucb1", "sw-ucb"}));
  bandit->add_option("--out", bandit_out, "CSV path ('-' for stdout)");

  // family-dump
  auto* family = app.add_subcommand("family-dump", "print the (beta_j, gamma_j) family as CSV");
  famrl::FamilySchedule sched;
  std::string family_out = "-";
  family->add_option("-n,--num-policies", sched.num_policies);
  family->add_option("--beta-max", sched.beta_max);
  family->add_option("--gamma0", sched.gamma0);
  family->add_option("--gamma1", sched.gamma1);
  family->add_option("--gamma2", sched.gamma2);
  family->add_flag("--reverse-gamma-tail", sched.reverse_gamma_tail);
  family->add_option("--out", family_out);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "normalise scores against human and random baselines");
  std::vector<std::string> hns_files;
  std::string metrics_csv_out = "-";
  metrics->add_option("--hns", hns_files, "scores.csv baselines.csv")->expected(2)->required();
  metrics->add_option("--out", metrics_csv_out);

  CLI11_PARSE(app, argc, argv);

  try {
    std::unique_ptr<std::ofstream> file;
    if (*train) {
      famrl::TrainConfig cfg;
      if (!config_path.empty()) cfg = famrl::load_config(config_path);
      if (!overrides.empty()) {
        std::string text;
        for (const auto& o : overrides) text += o + "\n";
        std::istringstream in(text);
        cfg = famrl::parse_config(in, cfg);
      }
      cfg.seed = seed;
      if (print_config) {
        famrl::write_config(std::cout, cfg);
        return 0;
      }
      const auto result = famrl::run_training(cfg);
      famrl::write_metrics_csv(open_output(metrics_out, file), result.metrics);
      std::cerr << "frames " << result.frames << ", learner updates " << result.learner_updates
                << ", sequences " << result.sequences_inserted << '\n';
      for (std::size_t j = 0; j < result.final_arm_returns.size(); ++j)
        std::cerr << "family member " << j << ": mean extrinsic return " << result.final_arm_returns[j] << '\n';
      return 0;
    }
    if (*verify) {
      famrl::VerifyOptions vo;
      vo.num_mdps = num_mdps;
      vo.seed = verify_seed;
      if (!equivalence_out.empty()) vo.equivalence_csv = &open_output(equivalence_out, file);
      bool all = true;
      for (const auto& c : famrl::run_verification(vo)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ", " << c.seconds << " s)\n";
        all = all && c.passed;
      }
      return all ? 0 : 1;
    }
    if (*bandit) {
      famrl::BanditConfig bc{means.size(), window, eps, bonus};
      if (rule == "ucb1") bc.rule = famrl::BanditRule::ucb1;
      if (rule == "sw-ucb") bc.rule = famrl::BanditRule::sliding_window_ucb;
      famrl::BanditSimConfig sim{means, steps, swap_at};
      famrl::Rng rng = famrl::make_rng(bandit_seed);
      const auto trace = famrl::simulate_bandit(bc, sim, rng);
      famrl::write_bandit_csv(open_output(bandit_out, file), trace, means.size());
      return 0;
    }
    if (*family) {
      famrl::write_family_csv(open_output(family_out, file), famrl::build_family(sched));
      return 0;
    }
    if (*metrics) {
      auto scores = open_input(hns_files[0]);
      auto baselines = open_input(hns_files[1]);
      famrl::write_normalized_csv(open_output(metrics_csv_out, file), famrl::normalize_scores(scores, baselines));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "famrl: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
