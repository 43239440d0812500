#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "famrl/mdp.hpp"
#include "famrl/transform.hpp"

namespace famrl {

/// Separately learned extrinsic and intrinsic values plus the mixing weight.
struct ValuePair {
  QTable q_extrinsic;
  QTable q_intrinsic;
  double beta = 0.0;
};

/// Q^e + beta Q^i
QTable mix_identity(const ValuePair& vp);

/// h(h^{-1}(Q^e) + beta h^{-1}(Q^i))
QTable mix_transformed(const ValuePair& vp, const ValueTransform& t);

/// mix_transformed when a transform is given, mix_identity otherwise.
QTable mix(const ValuePair& vp, const OptionalTransform& t);

/// Mixed value of a single entry, same rule as `mix`.
inline double mix_value(double qe, double qi, double beta, const OptionalTransform& t) {
  if (!t) return qe + beta * qi;
  return t->apply(t->inverse(qe) + beta * t->inverse(qi));
}

/// One step of the decomposed value-iteration scheme: both components are
/// backed up with their own reward under the greedy policy of the mix, with a
/// shared discount.
ValuePair decomposed_vi_step(const TabularMdp& mdp, const ValuePair& vp, double gamma,
                             const OptionalTransform& transform = std::nullopt);

struct EquivalenceOptions {
  std::size_t iters = 200;
  OptionalTransform transform;
  /// Initial components; zeros when empty.
  std::optional<QTable> q_extrinsic0;
  std::optional<QTable> q_intrinsic0;
  /// Initial table of the mixed scheme; mix(Q^e_0, Q^i_0) when empty.
  std::optional<QTable> q_mixed0;
};

struct EquivalenceReport {
  /// deviation[k] = max |mix(Q^e_k, Q^i_k) - Q_k| for k = 0..iters.
  std::vector<double> deviation;
  double max_deviation = 0.0;
  double final_deviation = 0.0;
};

/// Runs the decomposed scheme and the scheme on r^e + beta r^i side by side.
EquivalenceReport equivalence_report(const TabularMdp& mdp, double beta, double gamma,
                                     const EquivalenceOptions& options = {});

/// CSV rows "iteration,deviation" with a header line.
void write_equivalence_csv(std::ostream& out, const EquivalenceReport& report);

}  // namespace famrl
