#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "famrl/mdp.hpp"
#include "famrl/rng.hpp"

namespace famrl {

struct EnvStep {
  std::size_t state = 0;  // index of the next observation
  double reward = 0.0;    // extrinsic reward
  bool done = false;      // episode over (termination or time limit)
  bool terminal = false;  // true termination: no bootstrap past this step
};

/// Episodic environment with a finite observation index, used by actors and the evaluator.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t num_states() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::size_t reset(Rng& rng) = 0;
  /// Throws ProtocolError when called after the episode has ended.
  virtual EnvStep step(std::size_t action, Rng& rng) = 0;
  /// Features of the current observation for the novelty modules.
  virtual std::vector<double> embedding() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// ---------------------------------------------------------------------------
// Random coin: an empty square room with one coin. Stepping on the coin gives
// reward 1 and ends the episode; otherwise the episode ends after max_steps.

enum class CoinAction : std::size_t { up = 0, down = 1, left = 2, right = 3 };

/// How coin-room observations are indexed for Q tables.
enum class CoinEncoding {
  joint,     // (agent cell, coin cell)
  relative,  // coin position minus agent position
};

struct CoinConfig {
  int size = 15;
  int max_steps = 200;
  CoinEncoding encoding = CoinEncoding::joint;
};

struct CoinObservation {
  int agent_x = 0;
  int agent_y = 0;
  int coin_x = 0;
  int coin_y = 0;
  friend bool operator==(const CoinObservation&, const CoinObservation&) = default;
};

class RandomCoinEnv final : public Environment {
 public:
  static constexpr std::size_t kNumActions = 4;

  explicit RandomCoinEnv(CoinConfig config = {});

  /// Uniform agent cell, uniform coin cell among the others; step counter reset.
  CoinObservation reset_observation(Rng& rng);
  /// Places agent and coin explicitly (must differ).
  void place(CoinObservation obs);

  std::size_t num_states() const override;
  std::size_t num_actions() const override { return kNumActions; }
  std::size_t reset(Rng& rng) override;
  EnvStep step(std::size_t action, Rng& rng) override;
  EnvStep step(CoinAction action);
  std::vector<double> embedding() const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<RandomCoinEnv>(*this); }

  const CoinObservation& observation() const noexcept { return obs_; }
  int steps() const noexcept { return steps_; }
  bool done() const noexcept { return done_; }
  const CoinConfig& config() const noexcept { return config_; }

  std::size_t state_index() const { return encode(obs_, config_); }
  static std::size_t encode(const CoinObservation& obs, const CoinConfig& config);
  static std::size_t joint_index(const CoinObservation& obs, int size);

 private:
  CoinConfig config_;
  CoinObservation obs_{};
  int steps_ = 0;
  bool done_ = true;
};

/// Exact tabular model of the coin room over joint (agent, coin) states.
/// States with agent == coin are terminal; entering one pays 1. No time limit.
TabularMdp coin_to_mdp(const CoinConfig& config = {});

/// Manhattan distance between agent and coin.
int coin_distance(const CoinObservation& obs);

// ---------------------------------------------------------------------------
// Random finite MDPs.

struct MdpGeneratorConfig {
  std::size_t num_states = 5;
  std::size_t num_actions = 3;
  /// Fraction of (x, a) entries whose rewards are forced to zero.
  double reward_sparsity = 0.0;
  /// Successors per (x, a); 0 means every state.
  std::size_t branching = 0;
  bool with_intrinsic = true;
  /// The last `num_terminal` states are absorbing.
  std::size_t num_terminal = 0;
  std::uint64_t seed = 0;
};

/// Rewards uniform in [0, 1), transition rows normalised uniform draws.
TabularMdp generate_mdp(const MdpGeneratorConfig& config);

/// Environment that samples episodes from a TabularMdp, starting uniformly
/// in a non-terminal state; embeddings are one-hot state vectors.
class MdpEnv final : public Environment {
 public:
  MdpEnv(std::shared_ptr<const TabularMdp> mdp, int max_steps);

  std::size_t num_states() const override { return mdp_->num_states(); }
  std::size_t num_actions() const override { return mdp_->num_actions(); }
  std::size_t reset(Rng& rng) override;
  EnvStep step(std::size_t action, Rng& rng) override;
  std::vector<double> embedding() const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<MdpEnv>(*this); }

 private:
  std::shared_ptr<const TabularMdp> mdp_;
  int max_steps_;
  std::size_t state_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace famrl
