#include "famrl/errors.hpp"
#include "famrl/kernels.hpp"

namespace famrl::reference {

void weighted_state_sum(const QTable& weights, const QTable& values, std::span<double> out) {
  if (!weights.same_shape(values) || out.size() != values.num_states())
    throw DimensionError("weighted_state_sum: shape mismatch");
  for (std::size_t x = 0; x < values.num_states(); ++x) {
    double acc = 0.0;
    for (std::size_t a = 0; a < values.num_actions(); ++a) acc += weights(x, a) * values(x, a);
    out[x] = acc;
  }
}

void backup(const TabularMdp& mdp, std::span<const double> base, double scale, std::span<const double> v,
            QTable& out) {
  const std::size_t A = mdp.num_actions();
  if ((!base.empty() && base.size() != mdp.num_states() * A) || v.size() != mdp.num_states() ||
      out.num_states() != mdp.num_states() || out.num_actions() != A)
    throw DimensionError("backup: shape mismatch");
  for (std::size_t x = 0; x < mdp.num_states(); ++x) {
    for (std::size_t a = 0; a < A; ++a) {
      double acc = 0.0;
      for (const auto& s : mdp.successors(x, a)) acc += s.prob * v[s.state];
      out(x, a) = (base.empty() ? 0.0 : base[x * A + a]) + scale * acc;
    }
  }
}

void greedy_actions(const QTable& q, std::span<std::size_t> out) {
  if (out.size() != q.num_states()) throw DimensionError("greedy_actions: output shape");
  for (std::size_t x = 0; x < q.num_states(); ++x) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < q.num_actions(); ++a)
      if (q(x, a) > q(x, best)) best = a;
    out[x] = best;
  }
}

void transform_values(std::span<double> values, const ValueTransform& t, bool inverse) {
  for (double& z : values) z = inverse ? t.inverse(z) : t.apply(z);
}

}  // namespace famrl::reference
