#include "famrl/sequence.hpp"

#include <string>

#include "famrl/errors.hpp"

namespace famrl {

void validate_sequence(const TransitionSequence& seq) {
  if (seq.valid_length == 0) throw SchemaViolation("sequence has no valid step");
  if (seq.valid_length > seq.steps.size()) throw SchemaViolation("valid_length exceeds trace length");
  for (std::size_t s = 0; s < seq.valid_length; ++s) {
    const Transition& t = seq.steps[s];
    if (!(t.behavior_prob > 0.0 && t.behavior_prob <= 1.0))
      throw SchemaViolation("behaviour probability outside ]0, 1] at step " + std::to_string(s));
    if (t.family_index != seq.family_index) throw SchemaViolation("family index changes within a sequence");
    if (s + 1 < seq.valid_length) {
      const Transition& next = seq.steps[s + 1];
      if (t.terminal) throw SchemaViolation("sequence continues past a terminal step");
      if (t.next_observation != next.observation || next.prev_action != t.action ||
          next.prev_extrinsic_reward != t.extrinsic_reward || next.prev_intrinsic_reward != t.intrinsic_reward)
        throw SchemaViolation("sequence crosses an episode boundary at step " + std::to_string(s + 1));
    }
  }
}

}  // namespace famrl
