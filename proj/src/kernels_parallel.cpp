#include <cmath>
#include <cstdint>

#include "famrl/errors.hpp"
#include "famrl/kernels.hpp"

namespace famrl::kernels {

namespace {
void check_sizes(const TabularMdp& mdp, std::span<const double> base, std::span<const double> v,
                 const QTable& out) {
  const std::size_t sa = mdp.num_states() * mdp.num_actions();
  if (!base.empty() && base.size() != sa) throw DimensionError("backup: base table shape");
  if (v.size() != mdp.num_states()) throw DimensionError("backup: state vector shape");
  if (out.num_states() != mdp.num_states() || out.num_actions() != mdp.num_actions())
    throw DimensionError("backup: output table shape");
}
}  // namespace

void weighted_state_sum(const QTable& weights, const QTable& values, std::span<double> out) {
  if (!weights.same_shape(values) || out.size() != values.num_states())
    throw DimensionError("weighted_state_sum: shape mismatch");
  const auto states = static_cast<std::int64_t>(values.num_states());
  const std::size_t A = values.num_actions();
#pragma omp parallel for schedule(static)
  for (std::int64_t x = 0; x < states; ++x) {
    auto w = weights.row(static_cast<std::size_t>(x));
    auto q = values.row(static_cast<std::size_t>(x));
    double acc = 0.0;
    for (std::size_t a = 0; a < A; ++a) acc += w[a] * q[a];
    out[static_cast<std::size_t>(x)] = acc;
  }
}

void backup(const TabularMdp& mdp, std::span<const double> base, double scale, std::span<const double> v,
            QTable& out) {
  check_sizes(mdp, base, v, out);
  const std::size_t A = mdp.num_actions();
  const auto sa_count = static_cast<std::int64_t>(mdp.num_states() * A);
  auto dst = out.values();
#pragma omp parallel for schedule(static)
  for (std::int64_t sa = 0; sa < sa_count; ++sa) {
    const auto idx = static_cast<std::size_t>(sa);
    double acc = 0.0;
    for (const auto& s : mdp.successors(idx / A, idx % A)) acc += s.prob * v[s.state];
    dst[idx] = (base.empty() ? 0.0 : base[idx]) + scale * acc;
  }
}

void greedy_actions(const QTable& q, std::span<std::size_t> out) {
  if (out.size() != q.num_states()) throw DimensionError("greedy_actions: output shape");
  const auto states = static_cast<std::int64_t>(q.num_states());
  const std::size_t A = q.num_actions();
#pragma omp parallel for schedule(static)
  for (std::int64_t x = 0; x < states; ++x) {
    auto row = q.row(static_cast<std::size_t>(x));
    std::size_t best = 0;
    for (std::size_t a = 1; a < A; ++a)
      if (row[a] > row[best]) best = a;
    out[static_cast<std::size_t>(x)] = best;
  }
}

void transform_values(std::span<double> values, const ValueTransform& t, bool inverse) {
  if (t.is_identity()) return;
  const auto n = static_cast<std::int64_t>(values.size());
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (std::int64_t i = 0; i < n; ++i) {
    double& z = values[static_cast<std::size_t>(i)];
    if (!std::isfinite(z)) {
      bad = true;
      continue;
    }
    z = inverse ? t.inverse(z) : t.apply(z);
  }
  if (bad) throw DomainError("transform_values: non-finite entry");
}

}  // namespace famrl::kernels
