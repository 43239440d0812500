#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "famrl/rng.hpp"

namespace famrl {

struct EpisodicMemoryConfig {
  std::size_t capacity = 30000;
  std::size_t num_neighbors = 10;
  double kernel_epsilon = 1e-4;
  /// Pseudo-count added under the square root.
  double kernel_constant = 1e-3;
};

/// Per-episode embedding store (ring buffer) scoring new embeddings by an
/// inverse k-nearest-neighbour kernel sum.
class EpisodicMemory {
 public:
  explicit EpisodicMemory(EpisodicMemoryConfig config = {});

  /// Score of `embedding` against the current contents, then inserts it.
  /// The empty memory scores 1.
  double novelty(std::span<const double> embedding);
  /// Inserts without scoring.
  void add(std::span<const double> embedding);
  /// Empties the memory and the running distance statistics.
  void reset();

  std::size_t size() const noexcept { return size_; }
  const EpisodicMemoryConfig& config() const noexcept { return config_; }
  /// Running mean of squared k-NN distances observed so far.
  double mean_squared_distance() const noexcept;

 private:
  EpisodicMemoryConfig config_;
  std::vector<std::vector<double>> slots_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double distance_sum_ = 0.0;
  std::uint64_t distance_count_ = 0;
  std::vector<double> scratch_;
};

/// Convenience wrapper used by the tests and the verifier.
inline double episodic_novelty(std::span<const double> embedding, EpisodicMemory& mem) {
  return mem.novelty(embedding);
}

enum class LifelongBackend { count_based, random_distillation };

struct LifelongConfig {
  LifelongBackend backend = LifelongBackend::count_based;
  /// Random-distillation settings.
  std::size_t rnd_output_dim = 16;
  double rnd_learning_rate = 5e-4;
  std::uint64_t rnd_seed = 0;
};

/// Across-episode novelty multiplier alpha_t.
class LifelongModulator {
 public:
  explicit LifelongModulator(LifelongConfig config = {});

  /// alpha for `embedding`; updates counts or the predictor and its error statistics.
  double alpha(std::span<const double> embedding);

  const LifelongConfig& config() const noexcept { return config_; }
  /// Visits recorded for `embedding` (count backend).
  std::uint64_t visits(std::span<const double> embedding) const;

 private:
  double count_alpha(std::span<const double> embedding);
  double rnd_alpha(std::span<const double> embedding);

  LifelongConfig config_;
  std::map<std::vector<double>, std::uint64_t> counts_;

  Eigen::MatrixXd target_;
  Eigen::MatrixXd predictor_;
  std::uint64_t error_count_ = 0;
  double error_mean_ = 0.0;
  double error_m2_ = 0.0;
};

inline double lifelong_alpha(std::span<const double> embedding, LifelongModulator& mod) {
  return mod.alpha(embedding);
}

struct IntrinsicRewardConfig {
  /// Upper clamp L of the modulator factor.
  double clip_max = 5.0;
  double beta_scale = 0.3;
};

struct NoveltyConfig {
  EpisodicMemoryConfig episodic;
  LifelongConfig lifelong;
  IntrinsicRewardConfig reward;
  /// When false every intrinsic reward is zero.
  bool enabled = true;
};

/// r_episodic * min(max(alpha, 1), L)
double intrinsic_reward(double r_episodic, double alpha, const IntrinsicRewardConfig& cfg = {});

}  // namespace famrl
