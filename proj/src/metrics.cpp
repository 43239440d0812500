#include "famrl/metrics.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "famrl/csv.hpp"
#include "famrl/errors.hpp"

namespace famrl {

double hns(const ScoreTriple& t) {
  if (t.human == t.random) throw UndefinedBaselineError("human and random scores coincide");
  return (t.agent - t.random) / (t.human - t.random);
}

double chns(const ScoreTriple& t) { return std::clamp(hns(t), 0.0, 1.0); }

std::vector<double> windowed_mean(std::span<const double> returns, std::size_t window) {
  if (window == 0) throw InvalidArgument("windowed_mean: window must be positive");
  std::vector<double> out;
  out.reserve(returns.size());
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= i; ++k) sum += returns[k];
    out.push_back(sum / static_cast<double>(i + 1 - first));
  }
  return out;
}

double max_windowed_mean(std::span<const double> returns, std::size_t window) {
  if (returns.empty()) throw InvalidArgument("max_windowed_mean: no returns");
  const auto means = windowed_mean(returns, window);
  return *std::max_element(means.begin(), means.end());
}

std::vector<NormalizedScore> normalize_scores(std::istream& scores, std::istream& baselines) {
  const csv::Table base = csv::read(baselines);
  const std::size_t bg = base.column("game"), bh = base.column("human"), br = base.column("random");
  std::map<std::string, std::pair<double, double>> table;
  for (const auto& row : base.rows) table[row[bg]] = {csv::parse_double(row[bh]), csv::parse_double(row[br])};

  const csv::Table sc = csv::read(scores);
  const std::size_t sg = sc.column("game"), ss = sc.column("score");
  std::vector<NormalizedScore> out;
  for (const auto& row : sc.rows) {
    auto it = table.find(row[sg]);
    if (it == table.end()) throw UndefinedBaselineError("no baseline for game '" + row[sg] + "'");
    const ScoreTriple t{csv::parse_double(row[ss]), it->second.first, it->second.second};
    out.push_back({row[sg], hns(t), chns(t)});
  }
  return out;
}

void write_normalized_csv(std::ostream& out, const std::vector<NormalizedScore>& rows) {
  out << "game,hns,chns\n";
  for (const auto& r : rows) csv::write_row(out, {r.game, csv::format(r.hns), csv::format(r.chns)});
}

std::vector<NormalizedScore> read_normalized_csv(std::istream& in) {
  const csv::Table t = csv::read(in);
  const std::size_t g = t.column("game"), h = t.column("hns"), c = t.column("chns");
  std::vector<NormalizedScore> out;
  for (const auto& row : t.rows) out.push_back({row[g], csv::parse_double(row[h]), csv::parse_double(row[c])});
  return out;
}

}  // namespace famrl
