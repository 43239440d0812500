#pragma once

#include <cstddef>
#include <vector>

#include "famrl/decomposition.hpp"
#include "famrl/family.hpp"
#include "famrl/mdp.hpp"
#include "famrl/transform.hpp"

namespace famrl {

/// How values are learned and mixed, shared by actors, learner and evaluator.
struct ValueConfig {
  double retrace_lambda = 0.95;
  /// Learn each component with the h-transformed Retrace target.
  bool transform = true;
  double transform_epsilon = 1e-3;
  /// Mix components as h(h^-1(Q^e) + beta h^-1(Q^i)) rather than Q^e + beta Q^i.
  bool transformed_mix = true;

  OptionalTransform loss_transform() const;
  OptionalTransform mix_transform() const;
};

/// Extrinsic and intrinsic tables for every family index j.
struct ValueTables {
  std::vector<QTable> extrinsic;
  std::vector<QTable> intrinsic;

  ValueTables() = default;
  ValueTables(std::size_t family_size, std::size_t states, std::size_t actions, double init = 0.0);

  std::size_t family_size() const noexcept { return extrinsic.size(); }
  std::size_t num_states() const { return extrinsic.at(0).num_states(); }
  std::size_t num_actions() const { return extrinsic.at(0).num_actions(); }
  bool all_finite() const;
  friend bool operator==(const ValueTables&, const ValueTables&) = default;
};

/// Greedy action of the mixed value for family member j at state x (lowest index on ties).
std::size_t greedy_mix_action(const ValueTables& tables, std::size_t j, double beta, std::size_t x,
                              const OptionalTransform& mix_transform);

}  // namespace famrl
