#include "famrl/harness.hpp"

#include <atomic>
#include <chrono>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>
#include <variant>

#include "famrl/channel.hpp"
#include "famrl/csv.hpp"
#include "famrl/errors.hpp"
#include "famrl/learner.hpp"
#include "famrl/replay.hpp"

namespace famrl {

std::unique_ptr<Environment> make_environment(const TrainConfig& config) {
  switch (config.env) {
    case EnvKind::random_coin:
      return std::make_unique<RandomCoinEnv>(config.coin);
    case EnvKind::random_mdp:
      return std::make_unique<MdpEnv>(std::make_shared<const TabularMdp>(generate_mdp(config.mdp)),
                                      config.mdp_max_steps);
  }
  throw InternalError("unknown environment kind");
}

namespace {

struct Setup {
  std::shared_ptr<const PolicyFamily> family;
  std::unique_ptr<Environment> env;
};

Setup make_setup(const TrainConfig& config) {
  config.validate();
  Setup s;
  s.family = std::make_shared<const PolicyFamily>(config.family());
  s.env = make_environment(config);
  return s;
}

std::vector<Actor> make_actors(const TrainConfig& config, const Setup& setup, const SnapshotSource& source) {
  std::vector<Actor> actors;
  actors.reserve(config.num_actors);
  for (std::size_t l = 0; l < config.num_actors; ++l) {
    ActorConfig ac{l,
                   config.num_actors,
                   config.actor_base_eps,
                   config.actor_eps_alpha,
                   config.trace_length,
                   config.replay_period,
                   config.actor_refresh_period,
                   config.learner.priority_exponent};
    BanditConfig bandit = config.actor_bandit;
    bandit.num_arms = setup.family->size();
    NoveltyConfig novelty = config.novelty;
    novelty.lifelong.rnd_seed = config.seed * 1000 + l;
    actors.emplace_back(ac, setup.env->clone(), setup.family, config.values, bandit, novelty, source, config.seed);
  }
  return actors;
}

std::unique_ptr<Evaluator> make_evaluator(const TrainConfig& config, const Setup& setup,
                                          const SnapshotSource& source) {
  if (!config.evaluator) return nullptr;
  BanditConfig bandit = config.evaluator_bandit;
  bandit.num_arms = setup.family->size();
  return std::make_unique<Evaluator>(config.evaluator_config, setup.env->clone(), setup.family, config.values, bandit,
                                     source, config.seed);
}

void final_evaluation(const TrainConfig& config, const Setup& setup, TrainingResult& result) {
  if (config.final_eval_episodes == 0) return;
  Rng rng = make_rng(config.seed, 9);
  auto env = setup.env->clone();
  for (std::size_t j = 0; j < setup.family->size(); ++j)
    result.final_arm_returns.push_back(evaluate_arm(*env, *result.tables, *setup.family, config.values, j,
                                                    config.final_eval_episodes, config.evaluator_config.eps, rng));
}

TrainingResult run_single_process(const TrainConfig& config) {
  Setup setup = make_setup(config);
  const std::size_t S = setup.env->num_states();
  const std::size_t A = setup.env->num_actions();
  Learner learner(config.learner, config.values, *setup.family, S, A);
  SequenceReplay replay(config.replay);
  Rng learner_rng = make_rng(config.seed, 1);
  const SnapshotSource source = [&learner] { return learner.snapshot(); };
  std::vector<Actor> actors = make_actors(config, setup, source);
  auto evaluator = make_evaluator(config, setup, source);

  TrainingResult result;
  std::uint64_t frames = 0;
  std::uint64_t wall = 0;
  std::uint64_t next_metrics = config.metrics_interval;
  std::size_t since_update = 0;
  double loss_e = 0.0, loss_i = 0.0;

  auto record_metrics = [&] {
    MetricsRow row;
    row.wall_step = wall;
    row.frames = frames;
    row.evaluator_return_mean50 = evaluator ? evaluator->return_mean() : std::numeric_limits<double>::quiet_NaN();
    row.chosen_arm = evaluator ? evaluator->last_arm() : actors.front().current_arm();
    row.loss_e = loss_e;
    row.loss_i = loss_i;
    row.replay_fill = replay.fill_ratio();
    result.metrics.push_back(row);
  };

  while (frames < config.total_frames) {
    ++wall;
    for (auto& actor : actors) {
      if (frames >= config.total_frames) break;
      ActorStep s = actor.step();
      if (!(s.episode && s.episode->aborted)) ++frames;
      for (auto& ps : s.sequences) replay.insert(std::move(ps.sequence), ps.priority);
      if (s.episode) result.actor_episodes.push_back(*s.episode);
      if (++since_update >= config.steps_per_learner_update) {
        since_update = 0;
        if (auto u = learner.step(replay, learner_rng)) {
          loss_e = u->loss_extrinsic;
          loss_i = u->loss_intrinsic;
        }
      }
    }
    if (evaluator)
      if (auto rec = evaluator->step()) result.evaluator_episodes.push_back(*rec);
    if (frames >= next_metrics) {
      record_metrics();
      while (next_metrics <= frames) next_metrics += config.metrics_interval;
    }
  }
  if (result.metrics.empty() || result.metrics.back().frames != frames) record_metrics();

  result.frames = frames;
  result.learner_updates = learner.updates();
  result.sequences_inserted = replay.inserted();
  result.tables = learner.snapshot();
  final_evaluation(config, setup, result);
  return result;
}

// Multi-worker mode ---------------------------------------------------------

/// Latest published tables; actors and the evaluator read, the learner writes.
class SnapshotBoard {
 public:
  explicit SnapshotBoard(std::shared_ptr<const ValueTables> initial) : current_(std::move(initial)) {}
  std::shared_ptr<const ValueTables> get() const {
    std::lock_guard lock(mutex_);
    return current_;
  }
  void publish(std::shared_ptr<const ValueTables> tables) {
    std::lock_guard lock(mutex_);
    current_ = std::move(tables);
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const ValueTables> current_;
};

struct InsertMsg {
  std::vector<PrioritizedSequence> sequences;
};
struct SampleMsg {
  std::size_t batch_size;
  Channel<std::optional<ReplayBatch>>* reply;
};
struct PriorityMsg {
  std::vector<SequenceId> ids;
  std::vector<double> priorities;
};
using ReplayMsg = std::variant<InsertMsg, SampleMsg, PriorityMsg>;

TrainingResult run_multi_worker(const TrainConfig& config) {
  Setup setup = make_setup(config);
  const std::size_t S = setup.env->num_states();
  const std::size_t A = setup.env->num_actions();
  Learner learner(config.learner, config.values, *setup.family, S, A);
  SnapshotBoard board(learner.snapshot());
  const SnapshotSource source = [&board] { return board.get(); };
  std::vector<Actor> actors = make_actors(config, setup, source);
  auto evaluator = make_evaluator(config, setup, source);

  TrainingResult result;
  std::atomic<std::uint64_t> frames{0};
  std::atomic<bool> actors_done{false};
  std::atomic<double> replay_fill{0.0};
  std::atomic<std::uint64_t> inserted{0};
  std::atomic<double> eval_mean{std::numeric_limits<double>::quiet_NaN()};
  std::atomic<std::size_t> eval_arm{0};
  std::mutex records_mutex;
  Channel<ReplayMsg> replay_inbox;

  // The replay owner is the only thread touching the buffer.
  std::thread replay_owner([&] {
    SequenceReplay replay(config.replay);
    Rng rng = make_rng(config.seed, 1);
    while (auto msg = replay_inbox.receive()) {
      if (auto* ins = std::get_if<InsertMsg>(&*msg)) {
        for (auto& ps : ins->sequences) replay.insert(std::move(ps.sequence), ps.priority);
        replay_fill = replay.fill_ratio();
        inserted = replay.inserted();
      } else if (auto* req = std::get_if<SampleMsg>(&*msg)) {
        req->reply->send(replay.sample(req->batch_size, rng));
      } else if (auto* upd = std::get_if<PriorityMsg>(&*msg)) {
        replay.update_priorities(upd->ids, upd->priorities);
      }
    }
  });

  std::exception_ptr learner_error;
  std::thread learner_thread([&] {
    try {
      Channel<std::optional<ReplayBatch>> reply;
      std::uint64_t next_metrics = config.metrics_interval;
      std::uint64_t last_publish = 0;
      double loss_e = 0.0, loss_i = 0.0;
      std::uint64_t wall = 0;
      for (;;) {
        const std::uint64_t f = frames.load();
        const bool done = actors_done.load();
        if (f >= next_metrics || done) {
          MetricsRow row{wall, std::min(f, config.total_frames), eval_mean.load(), eval_arm.load(),
                         loss_e, loss_i, replay_fill.load()};
          result.metrics.push_back(row);
          while (next_metrics <= f) next_metrics += config.metrics_interval;
        }
        if (done) break;
        // Keep the configured actor:learner step ratio.
        if ((learner.updates() + 1) * config.steps_per_learner_update > f) {
          std::this_thread::sleep_for(std::chrono::microseconds(50));
          continue;
        }
        replay_inbox.send(SampleMsg{config.learner.batch_size, &reply});
        auto batch = reply.receive();
        ++wall;
        if (!batch || !*batch) {
          std::this_thread::sleep_for(std::chrono::microseconds(200));
          continue;
        }
        LearnerUpdate u = learner.update((*batch)->sequences);
        loss_e = u.loss_extrinsic;
        loss_i = u.loss_intrinsic;
        replay_inbox.send(PriorityMsg{std::move((*batch)->ids), std::move(u.priorities)});
        if (f - last_publish >= config.actor_refresh_period) {
          board.publish(learner.snapshot());
          last_publish = f;
        }
      }
    } catch (...) {
      learner_error = std::current_exception();
      actors_done = true;
    }
  });

  std::vector<std::thread> actor_threads;
  std::vector<std::exception_ptr> actor_errors(actors.size());
  for (std::size_t l = 0; l < actors.size(); ++l) {
    actor_threads.emplace_back([&, l] {
      try {
        while (!actors_done.load() && frames.fetch_add(1) < config.total_frames) {
          ActorStep s = actors[l].step();
          if (!s.sequences.empty()) replay_inbox.send(InsertMsg{std::move(s.sequences)});
          if (s.episode) {
            std::lock_guard lock(records_mutex);
            result.actor_episodes.push_back(*s.episode);
          }
        }
      } catch (...) {
        actor_errors[l] = std::current_exception();
      }
    });
  }

  std::thread evaluator_thread;
  if (evaluator) {
    evaluator_thread = std::thread([&] {
      while (!actors_done.load()) {
        if (auto rec = evaluator->step()) {
          eval_arm = rec->arm;
          eval_mean = evaluator->return_mean();
          std::lock_guard lock(records_mutex);
          result.evaluator_episodes.push_back(*rec);
        }
      }
    });
  }

  for (auto& t : actor_threads) t.join();
  actors_done = true;
  if (evaluator_thread.joinable()) evaluator_thread.join();
  learner_thread.join();
  replay_inbox.close();
  replay_owner.join();

  if (learner_error) std::rethrow_exception(learner_error);
  for (auto& e : actor_errors)
    if (e) std::rethrow_exception(e);

  result.frames = std::min<std::uint64_t>(frames.load(), config.total_frames);
  result.learner_updates = learner.updates();
  result.sequences_inserted = inserted.load();
  result.tables = learner.snapshot();
  final_evaluation(config, setup, result);
  return result;
}

}  // namespace

TrainingResult run_training(const TrainConfig& config) {
  return config.mode == RunMode::single_process ? run_single_process(config) : run_multi_worker(config);
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "wall_step,frames,evaluator_return_mean50,chosen_arm,loss_e,loss_i,replay_fill\n";
  for (const auto& r : rows)
    csv::write_row(out, {std::to_string(r.wall_step), std::to_string(r.frames), csv::format(r.evaluator_return_mean50),
                         std::to_string(r.chosen_arm), csv::format(r.loss_e), csv::format(r.loss_i),
                         csv::format(r.replay_fill)});
}

}  // namespace famrl
