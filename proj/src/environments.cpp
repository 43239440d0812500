#include "famrl/environments.hpp"

#include <algorithm>
#include <cstdlib>

#include "famrl/errors.hpp"

namespace famrl {

namespace {
constexpr int kDx[] = {0, 0, -1, 1};
constexpr int kDy[] = {-1, 1, 0, 0};

int clamp_cell(int v, int size) { return std::clamp(v, 0, size - 1); }
}  // namespace

RandomCoinEnv::RandomCoinEnv(CoinConfig config) : config_(config) {
  if (config_.size < 2) throw InvalidArgument("RandomCoinEnv: room must be at least 2x2");
  if (config_.max_steps < 1) throw InvalidArgument("RandomCoinEnv: max_steps must be positive");
}

std::size_t RandomCoinEnv::num_states() const {
  const auto n = static_cast<std::size_t>(config_.size);
  if (config_.encoding == CoinEncoding::relative) return (2 * n - 1) * (2 * n - 1);
  return n * n * n * n;
}

std::size_t RandomCoinEnv::joint_index(const CoinObservation& obs, int size) {
  const auto n = static_cast<std::size_t>(size);
  const std::size_t agent = static_cast<std::size_t>(obs.agent_y) * n + static_cast<std::size_t>(obs.agent_x);
  const std::size_t coin = static_cast<std::size_t>(obs.coin_y) * n + static_cast<std::size_t>(obs.coin_x);
  return agent * n * n + coin;
}

std::size_t RandomCoinEnv::encode(const CoinObservation& obs, const CoinConfig& config) {
  if (config.encoding == CoinEncoding::joint) return joint_index(obs, config.size);
  const int span = 2 * config.size - 1;
  const int dx = obs.coin_x - obs.agent_x + config.size - 1;
  const int dy = obs.coin_y - obs.agent_y + config.size - 1;
  return static_cast<std::size_t>(dy * span + dx);
}

int coin_distance(const CoinObservation& obs) {
  return std::abs(obs.agent_x - obs.coin_x) + std::abs(obs.agent_y - obs.coin_y);
}

CoinObservation RandomCoinEnv::reset_observation(Rng& rng) {
  const auto cells = static_cast<std::uint64_t>(config_.size * config_.size);
  const auto agent = uniform_index(rng, cells);
  auto coin = uniform_index(rng, cells - 1);
  if (coin >= agent) ++coin;
  obs_.agent_x = static_cast<int>(agent % static_cast<std::uint64_t>(config_.size));
  obs_.agent_y = static_cast<int>(agent / static_cast<std::uint64_t>(config_.size));
  obs_.coin_x = static_cast<int>(coin % static_cast<std::uint64_t>(config_.size));
  obs_.coin_y = static_cast<int>(coin / static_cast<std::uint64_t>(config_.size));
  steps_ = 0;
  done_ = false;
  return obs_;
}

void RandomCoinEnv::place(CoinObservation obs) {
  auto inside = [&](int v) { return v >= 0 && v < config_.size; };
  if (!inside(obs.agent_x) || !inside(obs.agent_y) || !inside(obs.coin_x) || !inside(obs.coin_y))
    throw InvalidArgument("RandomCoinEnv::place: position outside the room");
  if (obs.agent_x == obs.coin_x && obs.agent_y == obs.coin_y)
    throw InvalidArgument("RandomCoinEnv::place: agent and coin overlap");
  obs_ = obs;
  steps_ = 0;
  done_ = false;
}

std::size_t RandomCoinEnv::reset(Rng& rng) {
  reset_observation(rng);
  return state_index();
}

EnvStep RandomCoinEnv::step(std::size_t action, Rng& /*rng*/) {
  if (action >= kNumActions) throw InvalidArgument("RandomCoinEnv: action out of range");
  return step(static_cast<CoinAction>(action));
}

EnvStep RandomCoinEnv::step(CoinAction action) {
  if (done_) throw ProtocolError("RandomCoinEnv: step after episode end");
  const auto a = static_cast<std::size_t>(action);
  obs_.agent_x = clamp_cell(obs_.agent_x + kDx[a], config_.size);
  obs_.agent_y = clamp_cell(obs_.agent_y + kDy[a], config_.size);
  ++steps_;

  EnvStep out;
  if (obs_.agent_x == obs_.coin_x && obs_.agent_y == obs_.coin_y) {
    out.reward = 1.0;
    out.done = true;
    out.terminal = true;
  } else if (steps_ >= config_.max_steps) {
    out.done = true;
  }
  done_ = out.done;
  out.state = state_index();
  return out;
}

std::vector<double> RandomCoinEnv::embedding() const {
  return {static_cast<double>(obs_.agent_x), static_cast<double>(obs_.agent_y)};
}

TabularMdp coin_to_mdp(const CoinConfig& config) {
  const int n = config.size;
  const auto cells = static_cast<std::size_t>(n * n);
  const std::size_t S = cells * cells;
  const std::size_t A = RandomCoinEnv::kNumActions;
  std::vector<std::vector<Successor>> rows(S * A);
  std::vector<double> reward(S * A, 0.0);
  std::vector<bool> terminal(S, false);

  for (int ay = 0; ay < n; ++ay) {
    for (int ax = 0; ax < n; ++ax) {
      for (int cy = 0; cy < n; ++cy) {
        for (int cx = 0; cx < n; ++cx) {
          const CoinObservation obs{ax, ay, cx, cy};
          const std::size_t x = RandomCoinEnv::joint_index(obs, n);
          const bool on_coin = ax == cx && ay == cy;
          terminal[x] = on_coin;
          for (std::size_t a = 0; a < A; ++a) {
            if (on_coin) {
              rows[x * A + a] = {{x, 1.0}};
              continue;
            }
            CoinObservation next = obs;
            next.agent_x = clamp_cell(ax + kDx[a], n);
            next.agent_y = clamp_cell(ay + kDy[a], n);
            rows[x * A + a] = {{RandomCoinEnv::joint_index(next, n), 1.0}};
            if (next.agent_x == cx && next.agent_y == cy) reward[x * A + a] = 1.0;
          }
        }
      }
    }
  }
  return TabularMdp(S, A, std::move(rows), std::move(reward), {}, std::move(terminal));
}

TabularMdp generate_mdp(const MdpGeneratorConfig& config) {
  const std::size_t S = config.num_states;
  const std::size_t A = config.num_actions;
  if (S == 0 || A == 0) throw InvalidArgument("generate_mdp: empty state or action space");
  if (config.num_terminal >= S) throw InvalidArgument("generate_mdp: at least one non-terminal state required");
  Rng rng = make_rng(config.seed, 0x6d6470);

  const std::size_t first_terminal = S - config.num_terminal;
  const std::size_t branching = config.branching == 0 ? S : std::min(config.branching, S);
  std::vector<std::vector<Successor>> rows(S * A);
  std::vector<double> re(S * A, 0.0);
  std::vector<double> ri(S * A, 0.0);
  std::vector<bool> terminal(S, false);
  std::vector<std::size_t> order(S);

  for (std::size_t x = 0; x < S; ++x) {
    terminal[x] = x >= first_terminal;
    for (std::size_t a = 0; a < A; ++a) {
      auto& row = rows[x * A + a];
      if (terminal[x]) {
        row = {{x, 1.0}};
        continue;
      }
      for (std::size_t y = 0; y < S; ++y) order[y] = y;
      // Partial Fisher-Yates picks `branching` distinct successors.
      for (std::size_t k = 0; k < branching; ++k) {
        const auto pick = k + static_cast<std::size_t>(uniform_index(rng, S - k));
        std::swap(order[k], order[pick]);
      }
      std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(branching));
      double total = 0.0;
      for (std::size_t k = 0; k < branching; ++k) {
        const double w = uniform01(rng) + 1e-3;
        row.push_back({order[k], w});
        total += w;
      }
      for (auto& s : row) s.prob /= total;
      const bool silent = uniform01(rng) < config.reward_sparsity;
      re[x * A + a] = silent ? 0.0 : uniform01(rng);
      ri[x * A + a] = config.with_intrinsic ? uniform01(rng) : 0.0;
    }
  }
  return TabularMdp(S, A, std::move(rows), std::move(re), std::move(ri), std::move(terminal));
}

MdpEnv::MdpEnv(std::shared_ptr<const TabularMdp> mdp, int max_steps) : mdp_(std::move(mdp)), max_steps_(max_steps) {
  if (!mdp_) throw InvalidArgument("MdpEnv: null MDP");
  if (max_steps_ < 1) throw InvalidArgument("MdpEnv: max_steps must be positive");
  if (std::all_of(mdp_->terminal_mask().begin(), mdp_->terminal_mask().end(), [](bool t) { return t; }))
    throw InvalidArgument("MdpEnv: every state is terminal");
}

std::size_t MdpEnv::reset(Rng& rng) {
  do {
    state_ = static_cast<std::size_t>(uniform_index(rng, mdp_->num_states()));
  } while (mdp_->is_terminal(state_));
  steps_ = 0;
  done_ = false;
  return state_;
}

EnvStep MdpEnv::step(std::size_t action, Rng& rng) {
  if (done_) throw ProtocolError("MdpEnv: step after episode end");
  if (action >= mdp_->num_actions()) throw InvalidArgument("MdpEnv: action out of range");
  EnvStep out;
  out.reward = mdp_->reward_extrinsic(state_, action);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  auto succ = mdp_->successors(state_, action);
  std::size_t next = succ.back().state;
  for (const auto& s : succ) {
    cumulative += s.prob;
    if (u < cumulative) {
      next = s.state;
      break;
    }
  }
  state_ = next;
  ++steps_;
  out.terminal = mdp_->is_terminal(state_);
  out.done = out.terminal || steps_ >= max_steps_;
  done_ = out.done;
  out.state = state_;
  return out;
}

std::vector<double> MdpEnv::embedding() const {
  std::vector<double> e(mdp_->num_states(), 0.0);
  e[state_] = 1.0;
  return e;
}

}  // namespace famrl
