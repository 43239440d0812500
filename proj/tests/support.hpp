#pragma once

// Generators and independent reference computations shared by the test
// binaries. Nothing here calls the library's solvers: MDPs are drawn
// directly, and the oracles use dense Gaussian elimination or brute-force
// enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "famrl/mdp.hpp"
#include "famrl/transform.hpp"

namespace testsupport {

using famrl::QTable;
using famrl::RewardSelect;
using famrl::StochasticPolicy;
using famrl::TabularMdp;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::mt19937_64& engine() { return rng_; }

  /// Dense random MDP; every transition row has full support.
  TabularMdp mdp(std::size_t S, std::size_t A, bool intrinsic = true) {
    std::vector<double> p(S * A * S);
    for (std::size_t sa = 0; sa < S * A; ++sa) {
      double total = 0.0;
      for (std::size_t y = 0; y < S; ++y) total += p[sa * S + y] = uniform(0.05, 1.0);
      for (std::size_t y = 0; y < S; ++y) p[sa * S + y] /= total;
    }
    std::vector<double> re(S * A), ri(S * A, 0.0);
    for (auto& r : re) r = uniform();
    if (intrinsic)
      for (auto& r : ri) r = uniform();
    return TabularMdp::from_dense(S, A, p, re, ri);
  }

  /// Sparse random MDP with `branching` successors per (x, a) and optional terminal tail.
  TabularMdp sparse_mdp(std::size_t S, std::size_t A, std::size_t branching, std::size_t terminals = 0) {
    std::vector<double> p(S * A * S, 0.0);
    std::vector<double> re(S * A, 0.0), ri(S * A, 0.0);
    std::vector<bool> term(S, false);
    for (std::size_t t = 0; t < terminals; ++t) term[S - 1 - t] = true;
    for (std::size_t x = 0; x < S; ++x) {
      for (std::size_t a = 0; a < A; ++a) {
        const std::size_t sa = x * A + a;
        if (term[x]) {
          p[sa * S + x] = 1.0;
          continue;
        }
        double total = 0.0;
        for (std::size_t k = 0; k < branching; ++k) {
          const double w = uniform(0.1, 1.0);
          p[sa * S + index(S)] += w;
          total += w;
        }
        for (std::size_t y = 0; y < S; ++y) p[sa * S + y] /= total;
        re[sa] = coin(0.6) ? uniform() : 0.0;
        ri[sa] = uniform();
      }
    }
    return TabularMdp::from_dense(S, A, p, re, ri, term);
  }

  /// Deterministic acyclic chain: every action of state x moves to a state
  /// greater than x; the last state is terminal.
  TabularMdp acyclic_chain(std::size_t S, std::size_t A) {
    std::vector<double> p(S * A * S, 0.0);
    std::vector<double> re(S * A, 0.0), ri(S * A, 0.0);
    std::vector<bool> term(S, false);
    term[S - 1] = true;
    for (std::size_t x = 0; x < S; ++x)
      for (std::size_t a = 0; a < A; ++a) {
        const std::size_t sa = x * A + a;
        if (x == S - 1) {
          p[sa * S + x] = 1.0;
          continue;
        }
        const std::size_t y = x + 1 + index(S - 1 - x);
        p[sa * S + y] = 1.0;
        re[sa] = uniform();
        ri[sa] = uniform();
      }
    return TabularMdp::from_dense(S, A, p, re, ri, term);
  }

  StochasticPolicy policy(std::size_t S, std::size_t A, double min_prob = 0.0) {
    QTable t(S, A);
    for (std::size_t x = 0; x < S; ++x) {
      double total = 0.0;
      for (std::size_t a = 0; a < A; ++a) total += t(x, a) = uniform(min_prob, 1.0);
      for (std::size_t a = 0; a < A; ++a) t(x, a) /= total;
      // Exact row sums: fold the rounding residue into the last entry.
      double s = 0.0;
      for (std::size_t a = 0; a + 1 < A; ++a) s += t(x, a);
      t(x, A - 1) = 1.0 - s;
    }
    return StochasticPolicy(t);
  }

  std::vector<std::size_t> actions(std::size_t S, std::size_t A) {
    std::vector<std::size_t> out(S);
    for (auto& a : out) a = index(A);
    return out;
  }

  QTable table(std::size_t S, std::size_t A, double lo = -1.0, double hi = 1.0) {
    QTable q(S, A);
    for (double& v : q.values()) v = uniform(lo, hi);
    return q;
  }

 private:
  std::mt19937_64 rng_;
};

inline double reward_of(const TabularMdp& m, std::size_t x, std::size_t a, RewardSelect r) {
  switch (r.kind) {
    case RewardSelect::Kind::extrinsic:
      return m.reward_extrinsic(x, a);
    case RewardSelect::Kind::intrinsic:
      return m.reward_intrinsic(x, a);
    case RewardSelect::Kind::mixed:
      return m.reward_extrinsic(x, a) + r.beta * m.reward_intrinsic(x, a);
  }
  return 0.0;
}

/// Solves M z = b in place by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<double> M, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(M[r * n + c]) > std::abs(M[piv * n + c])) piv = r;
    if (M[piv * n + c] == 0.0) throw std::runtime_error("singular system");
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(M[c * n + k], M[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = M[r * n + c] / M[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) M[r * n + k] -= f * M[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> z(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= M[r * n + k] * z[k];
    z[r] = s / M[r * n + r];
  }
  return z;
}

/// Dense (SA x SA) matrix K[(x,a),(y,b)] = P(y|x,a) w(y,b); terminal rows are zero.
inline std::vector<double> weighted_kernel(const TabularMdp& m, const QTable& w) {
  const std::size_t S = m.num_states(), A = m.num_actions(), n = S * A;
  std::vector<double> K(n * n, 0.0);
  for (std::size_t x = 0; x < S; ++x)
    for (std::size_t a = 0; a < A; ++a) {
      if (m.is_terminal(x)) continue;
      for (const auto& s : m.successors(x, a))
        for (std::size_t b = 0; b < A; ++b) K[(x * A + a) * n + s.state * A + b] += s.prob * w(s.state, b);
    }
  return K;
}

/// Q^pi by solving (I - gamma P^pi) Q = r densely.
inline QTable policy_value(const TabularMdp& m, const StochasticPolicy& pi, double gamma,
                           RewardSelect r = RewardSelect::extrinsic()) {
  const std::size_t S = m.num_states(), A = m.num_actions(), n = S * A;
  std::vector<double> M = weighted_kernel(m, pi.table());
  for (double& v : M) v *= -gamma;
  for (std::size_t i = 0; i < n; ++i) M[i * n + i] += 1.0;
  std::vector<double> b(n);
  for (std::size_t x = 0; x < S; ++x)
    for (std::size_t a = 0; a < A; ++a) b[x * A + a] = m.is_terminal(x) ? 0.0 : reward_of(m, x, a, r);
  const auto z = solve_dense(M, b);
  QTable q(S, A);
  std::copy(z.begin(), z.end(), q.values().begin());
  return q;
}

/// Q* by policy iteration with dense solves (lowest-index tie rule).
inline QTable optimal_value(const TabularMdp& m, double gamma, RewardSelect r = RewardSelect::extrinsic()) {
  const std::size_t S = m.num_states(), A = m.num_actions();
  std::vector<std::size_t> act(S, 0);
  for (int iter = 0; iter < 1000; ++iter) {
    QTable t(S, A, 0.0);
    for (std::size_t x = 0; x < S; ++x) t(x, act[x]) = 1.0;
    const QTable q = policy_value(m, StochasticPolicy(t), gamma, r);
    bool changed = false;
    for (std::size_t x = 0; x < S; ++x) {
      std::size_t best = act[x];
      for (std::size_t a = 0; a < A; ++a)
        if (q(x, a) > q(x, best) + 1e-13) best = a;
      if (best != act[x]) {
        act[x] = best;
        changed = true;
      }
    }
    if (!changed) return q;
  }
  throw std::runtime_error("policy iteration did not settle");
}

/// Closed form of the Retrace operator:
///   T Q = Q + (I - gamma K)^{-1} delta,  K = P lambda min(mu, pi),
/// with delta = r + gamma P^pi Q - Q; in the transformed case Q is replaced by
/// h^{-1}(Q) inside and h is applied to the result.
inline QTable retrace_closed_form(const TabularMdp& m, const StochasticPolicy& mu, const StochasticPolicy& pi,
                                  const QTable& q, double lambda, double gamma,
                                  RewardSelect r = RewardSelect::extrinsic(),
                                  const famrl::OptionalTransform& t = std::nullopt) {
  const std::size_t S = m.num_states(), A = m.num_actions(), n = S * A;
  QTable base = q;
  if (t)
    for (double& v : base.values()) v = t->inverse(v);
  std::vector<double> delta(n);
  for (std::size_t x = 0; x < S; ++x)
    for (std::size_t a = 0; a < A; ++a) {
      double next = 0.0;
      if (!m.is_terminal(x))
        for (const auto& s : m.successors(x, a))
          for (std::size_t b = 0; b < A; ++b) next += s.prob * pi(s.state, b) * base(s.state, b);
      const double reward = m.is_terminal(x) ? 0.0 : reward_of(m, x, a, r);
      delta[x * A + a] = reward + gamma * next - base(x, a);
    }
  QTable w(S, A);
  for (std::size_t y = 0; y < S; ++y)
    for (std::size_t b = 0; b < A; ++b) w(y, b) = lambda * std::min(mu(y, b), pi(y, b));
  std::vector<double> M = weighted_kernel(m, w);
  for (double& v : M) v *= -gamma;
  for (std::size_t i = 0; i < n; ++i) M[i * n + i] += 1.0;
  const auto z = solve_dense(M, delta);
  QTable out(S, A);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = base.values()[i] + z[i];
    out.values()[i] = t ? t->apply(v) : v;
  }
  return out;
}

/// Q^pi(x, a) on a finite-horizon MDP by enumerating every trajectory.
inline double enumerate_return(const TabularMdp& m, const StochasticPolicy& pi, double gamma, std::size_t x,
                               std::size_t a, RewardSelect r = RewardSelect::extrinsic()) {
  if (m.is_terminal(x)) return 0.0;
  double total = reward_of(m, x, a, r);
  for (const auto& s : m.successors(x, a)) {
    if (m.is_terminal(s.state)) continue;
    for (std::size_t b = 0; b < m.num_actions(); ++b)
      if (pi(s.state, b) > 0.0) total += gamma * s.prob * pi(s.state, b) * enumerate_return(m, pi, gamma, s.state, b, r);
  }
  return total;
}

inline double sup_diff(const QTable& a, const QTable& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

}  // namespace testsupport
