#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace famrl {

struct ScoreTriple {
  double agent = 0.0;
  double human = 0.0;
  double random = 0.0;
};

/// (agent - random) / (human - random). Throws UndefinedBaselineError when human == random.
double hns(const ScoreTriple& t);
/// hns clamped into [0, 1].
double chns(const ScoreTriple& t);

/// Trailing mean over the last `window` entries (fewer at the start).
std::vector<double> windowed_mean(std::span<const double> returns, std::size_t window = 50);
/// Final-score rule: the maximum of the windowed means. Throws on empty input.
double max_windowed_mean(std::span<const double> returns, std::size_t window = 50);

struct NormalizedScore {
  std::string game;
  double hns = 0.0;
  double chns = 0.0;
  friend bool operator==(const NormalizedScore&, const NormalizedScore&) = default;
};

/// scores: columns game,score. baselines: columns game,human,random.
/// Every scored game needs a baseline row (UndefinedBaselineError otherwise).
std::vector<NormalizedScore> normalize_scores(std::istream& scores, std::istream& baselines);

/// Header game,hns,chns.
void write_normalized_csv(std::ostream& out, const std::vector<NormalizedScore>& rows);
std::vector<NormalizedScore> read_normalized_csv(std::istream& in);

}  // namespace famrl
