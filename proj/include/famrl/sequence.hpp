#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace famrl {

/// Stand-in for a recurrent core state. Tabular agents are memoryless, so it
/// carries nothing; it keeps the stored timestep layout complete.
struct RecurrentState {
  friend bool operator==(const RecurrentState&, const RecurrentState&) = default;
};

/// One stored timestep omega_s.
struct Transition {
  double prev_extrinsic_reward = 0.0;
  double prev_intrinsic_reward = 0.0;
  std::size_t prev_action = 0;
  RecurrentState prev_recurrent{};
  std::size_t observation = 0;
  std::size_t action = 0;
  RecurrentState recurrent{};
  double behavior_prob = 1.0;  // mu_s, probability the actor had of choosing `action`
  std::size_t family_index = 0;
  double extrinsic_reward = 0.0;
  double intrinsic_reward = 0.0;
  std::size_t next_observation = 0;
  /// next_observation ends the episode by termination (no bootstrap).
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Fixed-length window of one episode. Steps past `valid_length` are
/// zero padding and are excluded from losses and priorities.
struct TransitionSequence {
  std::vector<Transition> steps;
  std::size_t valid_length = 0;
  std::size_t family_index = 0;
  std::size_t actor = 0;
  std::uint64_t episode = 0;
  /// Episode step index of steps[0].
  std::size_t start = 0;

  std::size_t trace_length() const noexcept { return steps.size(); }
  bool is_valid(std::size_t s) const noexcept { return s < valid_length; }

  friend bool operator==(const TransitionSequence&, const TransitionSequence&) = default;
};

/// Throws SchemaViolation when the sequence crosses an episode boundary, mixes
/// family indices, has behaviour probabilities outside ]0, 1] or no valid step.
void validate_sequence(const TransitionSequence& seq);

}  // namespace famrl
