#include "famrl/decomposition.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>

#include "famrl/bellman.hpp"
#include "famrl/errors.hpp"

namespace famrl {

namespace {
void require_pair_shape(const ValuePair& vp) {
  if (!vp.q_extrinsic.same_shape(vp.q_intrinsic)) throw DimensionError("ValuePair: component shapes differ");
}

QTable step_component(const TabularMdp& mdp, const StochasticPolicy& pi, const QTable& q, double gamma,
                      RewardSelect reward, const OptionalTransform& t) {
  return t ? transformed_bellman_eval_step(mdp, pi, q, gamma, *t, reward)
           : bellman_eval_step(mdp, pi, q, gamma, reward);
}
}  // namespace

QTable mix_identity(const ValuePair& vp) {
  require_pair_shape(vp);
  QTable out = vp.q_extrinsic;
  auto qi = vp.q_intrinsic.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += vp.beta * qi[i];
  return out;
}

QTable mix_transformed(const ValuePair& vp, const ValueTransform& t) {
  require_pair_shape(vp);
  QTable out(vp.q_extrinsic.num_states(), vp.q_extrinsic.num_actions());
  auto qe = vp.q_extrinsic.values();
  auto qi = vp.q_intrinsic.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = t.apply(t.inverse(qe[i]) + vp.beta * t.inverse(qi[i]));
  return out;
}

QTable mix(const ValuePair& vp, const OptionalTransform& t) {
  return t ? mix_transformed(vp, *t) : mix_identity(vp);
}

ValuePair decomposed_vi_step(const TabularMdp& mdp, const ValuePair& vp, double gamma,
                             const OptionalTransform& transform) {
  require_pair_shape(vp);
  const StochasticPolicy pi = greedy_policy(mix(vp, transform));
  return ValuePair{step_component(mdp, pi, vp.q_extrinsic, gamma, RewardSelect::extrinsic(), transform),
                   step_component(mdp, pi, vp.q_intrinsic, gamma, RewardSelect::intrinsic(), transform), vp.beta};
}

EquivalenceReport equivalence_report(const TabularMdp& mdp, double beta, double gamma,
                                     const EquivalenceOptions& options) {
  if (options.iters < 1) throw InvalidArgument("equivalence_report: iters must be at least 1");
  require_discount(gamma);
  const QTable zeros(mdp.num_states(), mdp.num_actions());
  ValuePair vp{options.q_extrinsic0.value_or(zeros), options.q_intrinsic0.value_or(zeros), beta};
  QTable q = options.q_mixed0 ? *options.q_mixed0 : mix(vp, options.transform);
  const RewardSelect mixed = RewardSelect::mixed(beta);

  EquivalenceReport report;
  report.deviation.reserve(options.iters + 1);
  auto record = [&] {
    report.deviation.push_back(mix(vp, options.transform).max_abs_diff(q));
  };
  record();
  for (std::size_t k = 0; k < options.iters; ++k) {
    vp = decomposed_vi_step(mdp, vp, gamma, options.transform);
    q = step_component(mdp, greedy_policy(q), q, gamma, mixed, options.transform);
    record();
  }
  report.max_deviation = *std::max_element(report.deviation.begin(), report.deviation.end());
  report.final_deviation = report.deviation.back();
  return report;
}

void write_equivalence_csv(std::ostream& out, const EquivalenceReport& report) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "iteration,deviation\n";
  for (std::size_t k = 0; k < report.deviation.size(); ++k) out << k << ',' << report.deviation[k] << '\n';
  out.precision(old_precision);
}

}  // namespace famrl
