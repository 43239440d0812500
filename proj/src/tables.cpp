#include "famrl/tables.hpp"

#include "famrl/errors.hpp"

namespace famrl {

OptionalTransform ValueConfig::loss_transform() const {
  if (!transform) return std::nullopt;
  return ValueTransform::squash(transform_epsilon);
}

OptionalTransform ValueConfig::mix_transform() const {
  if (!transformed_mix) return std::nullopt;
  return ValueTransform::squash(transform_epsilon);
}

ValueTables::ValueTables(std::size_t family_size, std::size_t states, std::size_t actions, double init)
    : extrinsic(family_size, QTable(states, actions, init)), intrinsic(family_size, QTable(states, actions, init)) {
  if (family_size == 0 || states == 0 || actions == 0) throw InvalidArgument("value tables need a non-empty shape");
}

bool ValueTables::all_finite() const {
  for (const auto& q : extrinsic)
    if (!q.all_finite()) return false;
  for (const auto& q : intrinsic)
    if (!q.all_finite()) return false;
  return true;
}

std::size_t greedy_mix_action(const ValueTables& tables, std::size_t j, double beta, std::size_t x,
                              const OptionalTransform& mix_transform) {
  const QTable& qe = tables.extrinsic.at(j);
  const QTable& qi = tables.intrinsic.at(j);
  if (x >= qe.num_states()) throw DimensionError("greedy_mix_action: state out of range");
  std::size_t best = 0;
  double best_value = mix_value(qe(x, 0), qi(x, 0), beta, mix_transform);
  for (std::size_t a = 1; a < qe.num_actions(); ++a) {
    const double v = mix_value(qe(x, a), qi(x, a), beta, mix_transform);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

}  // namespace famrl
