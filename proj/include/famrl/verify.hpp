#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace famrl {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// Random MDPs per equivalence suite.
  std::size_t num_mdps = 50;
  std::uint64_t seed = 0;
  /// When set, receives "iteration,deviation" rows: the largest deviation at
  /// each iteration over the whole decomposition suite.
  std::ostream* equivalence_csv = nullptr;
};

/// Runs the operator, equivalence, bandit, schedule, protocol and metric suites.
std::vector<VerifyCheck> run_verification(const VerifyOptions& options = {});

}  // namespace famrl
