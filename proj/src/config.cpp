#include "famrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "famrl/csv.hpp"
#include "famrl/errors.hpp"

namespace famrl {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Lower case, TeX markup dropped, runs of blanks collapsed.
std::string normalise_name(const std::string& raw) {
  std::string out;
  bool space = false;
  for (char c : raw) {
    if (c == '$' || c == '\\' || c == '{' || c == '}') continue;
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

double to_double(const std::string& v) { return csv::parse_double(v); }

std::uint64_t to_uint(const std::string& v) {
  // Accept forms like 2e6 for large counts.
  const double d = csv::parse_double(v);
  if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d)))
    throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

std::string fmt(double v) { return csv::format(v); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::vector<FamilyMember> parse_pairs(const std::string& v) {
  // "beta:gamma; beta:gamma"
  std::vector<FamilyMember> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("family pair needs beta:gamma, got '" + item + "'");
    out.push_back({to_double(item.substr(0, colon)), to_double(item.substr(colon + 1))});
  }
  return out;
}

std::string format_pairs(const std::vector<FamilyMember>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out += "; ";
    out += fmt(pairs[i].beta) + ":" + fmt(pairs[i].gamma);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define FAMRL_DOUBLE(name, member)                                                  \
  Field {                                                                            \
    name, [](TrainConfig& c, const std::string& v) { c.member = to_double(v); },     \
        [](const TrainConfig& c) { return fmt(c.member); }                           \
  }
#define FAMRL_UINT(name, member, type)                                                          \
  Field {                                                                                        \
    name, [](TrainConfig& c, const std::string& v) { c.member = static_cast<type>(to_uint(v)); }, \
        [](const TrainConfig& c) { return std::to_string(c.member); }                            \
  }
#define FAMRL_BOOL(name, member)                                                \
  Field {                                                                        \
    name, [](TrainConfig& c, const std::string& v) { c.member = to_bool(v); },   \
        [](const TrainConfig& c) { return fmt_bool(c.member); }                  \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      FAMRL_UINT("seed", seed, std::uint64_t),
      {"mode",
       [](TrainConfig& c, const std::string& v) {
         const auto s = lower(v);
         if (s == "single" || s == "single_process") c.mode = RunMode::single_process;
         else if (s == "threads" || s == "multi_worker") c.mode = RunMode::multi_worker;
         else throw ConfigError("mode must be single or threads");
       },
       [](const TrainConfig& c) { return std::string(c.mode == RunMode::single_process ? "single" : "threads"); }},
      FAMRL_UINT("total_frames", total_frames, std::uint64_t),
      FAMRL_UINT("metrics_interval", metrics_interval, std::uint64_t),
      FAMRL_UINT("steps_per_learner_update", steps_per_learner_update, std::size_t),
      FAMRL_UINT("final_eval_episodes", final_eval_episodes, std::size_t),
      {"env",
       [](TrainConfig& c, const std::string& v) {
         const auto s = lower(v);
         if (s == "random_coin") c.env = EnvKind::random_coin;
         else if (s == "random_mdp") c.env = EnvKind::random_mdp;
         else throw ConfigError("env must be random_coin or random_mdp");
       },
       [](const TrainConfig& c) { return std::string(c.env == EnvKind::random_coin ? "random_coin" : "random_mdp"); }},
      FAMRL_UINT("coin_size", coin.size, int),
      FAMRL_UINT("coin_max_steps", coin.max_steps, int),
      {"coin_encoding",
       [](TrainConfig& c, const std::string& v) {
         const auto s = lower(v);
         if (s == "joint") c.coin.encoding = CoinEncoding::joint;
         else if (s == "relative") c.coin.encoding = CoinEncoding::relative;
         else throw ConfigError("coin_encoding must be joint or relative");
       },
       [](const TrainConfig& c) {
         return std::string(c.coin.encoding == CoinEncoding::joint ? "joint" : "relative");
       }},
      FAMRL_UINT("mdp_states", mdp.num_states, std::size_t),
      FAMRL_UINT("mdp_actions", mdp.num_actions, std::size_t),
      FAMRL_DOUBLE("mdp_reward_sparsity", mdp.reward_sparsity),
      FAMRL_UINT("mdp_branching", mdp.branching, std::size_t),
      FAMRL_UINT("mdp_terminal_states", mdp.num_terminal, std::size_t),
      FAMRL_UINT("mdp_seed", mdp.seed, std::uint64_t),
      FAMRL_UINT("mdp_max_steps", mdp_max_steps, int),
      FAMRL_UINT("num_policies", schedule.num_policies, std::size_t),
      FAMRL_DOUBLE("beta_max", schedule.beta_max),
      FAMRL_DOUBLE("gamma0", schedule.gamma0),
      FAMRL_DOUBLE("gamma1", schedule.gamma1),
      FAMRL_DOUBLE("gamma2", schedule.gamma2),
      FAMRL_BOOL("reverse_gamma_tail", schedule.reverse_gamma_tail),
      {"family_pairs", [](TrainConfig& c, const std::string& v) { c.family_pairs = parse_pairs(v); },
       [](const TrainConfig& c) { return format_pairs(c.family_pairs); }},
      FAMRL_UINT("num_actors", num_actors, std::size_t),
      FAMRL_DOUBLE("actor_base_eps", actor_base_eps),
      FAMRL_DOUBLE("actor_eps_alpha", actor_eps_alpha),
      FAMRL_UINT("actor_refresh_period", actor_refresh_period, std::size_t),
      FAMRL_UINT("actor_bandit_window", actor_bandit.window, std::size_t),
      FAMRL_DOUBLE("actor_bandit_eps", actor_bandit.eps),
      {"bandit_beta",
       [](TrainConfig& c, const std::string& v) { c.actor_bandit.bonus = c.evaluator_bandit.bonus = to_double(v); },
       [](const TrainConfig& c) { return fmt(c.actor_bandit.bonus); }},
      FAMRL_UINT("evaluator_bandit_window", evaluator_bandit.window, std::size_t),
      FAMRL_DOUBLE("evaluator_bandit_eps", evaluator_bandit.eps),
      FAMRL_BOOL("evaluator", evaluator),
      FAMRL_DOUBLE("evaluator_eps", evaluator_config.eps),
      FAMRL_UINT("evaluator_phase_length", evaluator_config.phase_length, std::size_t),
      FAMRL_UINT("trace_length", trace_length, std::size_t),
      FAMRL_UINT("replay_period", replay_period, std::size_t),
      FAMRL_UINT("replay_capacity", replay.capacity, std::size_t),
      FAMRL_UINT("min_replay", replay.min_to_start, std::size_t),
      {"priority_exponent",
       [](TrainConfig& c, const std::string& v) { c.replay.priority_exponent = c.learner.priority_exponent = to_double(v); },
       [](const TrainConfig& c) { return fmt(c.learner.priority_exponent); }},
      {"importance_sampling_exponent",
       [](TrainConfig&, const std::string& v) {
         if (to_double(v) != 0.0) throw ConfigError("only importance_sampling_exponent = 0 is supported");
       },
       [](const TrainConfig&) { return std::string("0"); }},
      FAMRL_UINT("batch_size", learner.batch_size, std::size_t),
      {"optimizer",
       [](TrainConfig& c, const std::string& v) {
         const auto s = lower(v);
         if (s == "sgd") c.learner.optimizer = OptimizerKind::sgd;
         else if (s == "adam" || s == "adamoptimizer") c.learner.optimizer = OptimizerKind::adam;
         else throw ConfigError("optimizer must be sgd or adam");
       },
       [](const TrainConfig& c) { return std::string(c.learner.optimizer == OptimizerKind::sgd ? "sgd" : "adam"); }},
      FAMRL_DOUBLE("learning_rate", learner.learning_rate),
      FAMRL_DOUBLE("adam_learning_rate", learner.adam_learning_rate),
      FAMRL_DOUBLE("adam_beta1", learner.adam_beta1),
      FAMRL_DOUBLE("adam_beta2", learner.adam_beta2),
      FAMRL_DOUBLE("adam_epsilon", learner.adam_epsilon),
      FAMRL_UINT("target_update_period", learner.target_update_period, std::size_t),
      FAMRL_DOUBLE("divergence_bound", learner.divergence_bound),
      FAMRL_DOUBLE("init_value", learner.init_value),
      FAMRL_DOUBLE("retrace_lambda", values.retrace_lambda),
      {"transform",
       [](TrainConfig& c, const std::string& v) {
         const auto s = lower(v);
         // The long spelling of this setting gives the formula itself.
         if (s.find("sqrt") != std::string::npos || s == "h") c.values.transform = true;
         else if (s == "identity") c.values.transform = false;
         else c.values.transform = to_bool(v);
       },
       [](const TrainConfig& c) { return fmt_bool(c.values.transform); }},
      FAMRL_DOUBLE("transform_epsilon", values.transform_epsilon),
      {"mix",
       [](TrainConfig& c, const std::string& v) {
         const auto s = lower(v);
         if (s == "transformed") c.values.transformed_mix = true;
         else if (s == "identity") c.values.transformed_mix = false;
         else throw ConfigError("mix must be transformed or identity");
       },
       [](const TrainConfig& c) { return std::string(c.values.transformed_mix ? "transformed" : "identity"); }},
      FAMRL_BOOL("intrinsic_rewards", novelty.enabled),
      {"lifelong_backend",
       [](TrainConfig& c, const std::string& v) {
         const auto s = lower(v);
         if (s == "count" || s == "count_based") c.novelty.lifelong.backend = LifelongBackend::count_based;
         else if (s == "rnd" || s == "random_distillation") c.novelty.lifelong.backend = LifelongBackend::random_distillation;
         else throw ConfigError("lifelong_backend must be count or rnd");
       },
       [](const TrainConfig& c) {
         return std::string(c.novelty.lifelong.backend == LifelongBackend::count_based ? "count" : "rnd");
       }},
      FAMRL_UINT("rnd_output_dim", novelty.lifelong.rnd_output_dim, std::size_t),
      FAMRL_DOUBLE("rnd_learning_rate", novelty.lifelong.rnd_learning_rate),
      FAMRL_UINT("episodic_capacity", novelty.episodic.capacity, std::size_t),
      FAMRL_UINT("num_neighbors", novelty.episodic.num_neighbors, std::size_t),
      FAMRL_DOUBLE("kernel_epsilon", novelty.episodic.kernel_epsilon),
      FAMRL_DOUBLE("kernel_constant", novelty.episodic.kernel_constant),
      FAMRL_DOUBLE("clip_max", novelty.reward.clip_max),
  };
  return table;
}

#undef FAMRL_DOUBLE
#undef FAMRL_UINT
#undef FAMRL_BOOL

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace

const std::vector<ConfigKeyInfo>& hyperparameter_aliases() {
  static const std::vector<ConfigKeyInfo> table = {
      {"Number of mixtures N", "num_policies", "32"},
      {"Optimizer", "optimizer", "AdamOptimizer"},
      {"Learning rate (R2D2)", "adam_learning_rate", "0.0001"},
      {"Learning rate (RND and Action prediction)", "rnd_learning_rate", "0.0005"},
      {"Adam epsilon", "adam_epsilon", "0.0001"},
      {"Adam beta1", "adam_beta1", "0.9"},
      {"Adam beta2", "adam_beta2", "0.999"},
      {"Adam clip norm", "", "40"},
      {"Discount r^i", "", "0.99"},
      {"Discount r^e", "", "0.997"},
      {"Batch size", "batch_size", "64"},
      {"Trace length", "trace_length", "160"},
      {"Replay period", "replay_period", "80"},
      {"Retrace lambda", "retrace_lambda", "0.95"},
      {"R2D2 reward transformation", "transform", "sign(x) * (sqrt(|x| + 1) - 1) + 0.001 * x"},
      {"Episodic memory capacity", "episodic_capacity", "30000"},
      {"Embeddings memory mode", "", "Ring buffer"},
      {"Intrinsic reward scale beta", "beta_max", "0.3"},
      {"Kernel epsilon", "kernel_epsilon", "0.0001"},
      {"Kernel num. neighbors used", "num_neighbors", "10"},
      {"Replay capacity", "replay_capacity", "5e6"},
      {"Replay priority exponent", "priority_exponent", "0.9"},
      {"Importance sampling exponent", "importance_sampling_exponent", "0.0"},
      {"Minimum sequences to start replay", "min_replay", "6250"},
      {"Actor update period", "actor_refresh_period", "100"},
      {"Target Q-network update period", "target_update_period", "1500"},
      {"Embeddings target update period", "", "once/episode"},
      {"Action prediction network L2 weight", "", "0.00001"},
      {"RND clipping factor L", "clip_max", "5"},
      {"Evaluation epsilon", "evaluator_eps", "0.01"},
      {"Target epsilon", "", "0.01"},
      {"Bandit window size", "actor_bandit_window", "90"},
      {"Bandit UCB beta", "bandit_beta", "1"},
      {"Bandit epsilon", "actor_bandit_eps", "0.5"},
  };
  return table;
}

TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::map<std::string, const ConfigKeyInfo*> aliases;
  for (const auto& a : hyperparameter_aliases()) aliases[normalise_name(a.name)] = &a;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string raw_key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    const Field* field = find_field(raw_key);
    if (!field) {
      auto it = aliases.find(normalise_name(raw_key));
      if (it == aliases.end()) throw ConfigError(where + "unknown key '" + raw_key + "'");
      if (it->second->key.empty()) continue;  // recognised, no effect on tabular agents
      field = find_field(it->second->key);
      if (!field) throw InternalError("alias without a field: " + it->second->key);
    }
    try {
      field->set(base, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const SchemaViolation& e) {
      throw ConfigError(where + "bad value for '" + raw_key + "': " + e.what());
    }
  }
  return base;
}

TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const TrainConfig& config) {
  for (const auto& f : fields()) out << f.key << " = " << f.get(config) << '\n';
}

PolicyFamily TrainConfig::family() const {
  if (!family_pairs.empty()) return PolicyFamily(family_pairs);
  return build_family(schedule);
}

void TrainConfig::validate() const {
  try {
    (void)family();
  } catch (const Error& e) {
    throw ConfigError(std::string("family: ") + e.what());
  }
  if (num_actors == 0) throw ConfigError("num_actors must be positive");
  if (total_frames == 0) throw ConfigError("total_frames must be positive");
  if (metrics_interval == 0) throw ConfigError("metrics_interval must be positive");
  if (steps_per_learner_update == 0) throw ConfigError("steps_per_learner_update must be positive");
  if (trace_length == 0 || replay_period >= trace_length)
    throw ConfigError("need 0 <= replay_period < trace_length");
  if (actor_refresh_period == 0) throw ConfigError("actor_refresh_period must be positive");
  if (!(actor_base_eps > 0.0 && actor_base_eps <= 1.0)) throw ConfigError("actor_base_eps must lie in ]0, 1]");
  if (!(values.retrace_lambda >= 0.0 && values.retrace_lambda <= 1.0))
    throw ConfigError("retrace_lambda must lie in [0, 1]");
  if (values.transformed_mix && !values.transform) throw ConfigError("mix = transformed requires transform = true");
  if (values.transform && !(values.transform_epsilon > 0.0)) throw ConfigError("transform_epsilon must be positive");
  if (replay.capacity == 0) throw ConfigError("replay_capacity must be positive");
  if (learner.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (env == EnvKind::random_coin && (coin.size < 2 || coin.max_steps < 1))
    throw ConfigError("coin room needs size >= 2 and max_steps >= 1");
}

}  // namespace famrl
