#include "famrl/novelty.hpp"

#include <algorithm>
#include <cmath>

#include "famrl/errors.hpp"

namespace famrl {

EpisodicMemory::EpisodicMemory(EpisodicMemoryConfig config) : config_(config) {
  if (config_.capacity == 0) throw InvalidArgument("episodic memory capacity must be positive");
  if (config_.num_neighbors == 0) throw InvalidArgument("episodic memory needs at least one neighbour");
  if (!(config_.kernel_epsilon > 0.0)) throw InvalidArgument("kernel epsilon must be positive");
  if (!(config_.kernel_constant > 0.0)) throw InvalidArgument("kernel constant must be positive");
}

double EpisodicMemory::mean_squared_distance() const noexcept {
  return distance_count_ == 0 ? 0.0 : distance_sum_ / static_cast<double>(distance_count_);
}

void EpisodicMemory::add(std::span<const double> embedding) {
  if (slots_.size() < config_.capacity) {
    slots_.emplace_back(embedding.begin(), embedding.end());
  } else {
    slots_[next_].assign(embedding.begin(), embedding.end());
  }
  next_ = (next_ + 1) % config_.capacity;
  size_ = slots_.size();
}

void EpisodicMemory::reset() {
  slots_.clear();
  next_ = 0;
  size_ = 0;
  distance_sum_ = 0.0;
  distance_count_ = 0;
}

double EpisodicMemory::novelty(std::span<const double> embedding) {
  if (size_ == 0) {
    add(embedding);
    return 1.0;
  }
  scratch_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto& e = slots_[i];
    if (e.size() != embedding.size()) throw DimensionError("episodic memory: embedding size changed");
    double d2 = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const double diff = e[k] - embedding[k];
      d2 += diff * diff;
    }
    scratch_[i] = d2;
  }
  const std::size_t k = std::min(config_.num_neighbors, size_);
  std::partial_sort(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(k), scratch_.end());
  for (std::size_t i = 0; i < k; ++i) distance_sum_ += scratch_[i];
  distance_count_ += k;

  const double dm2 = mean_squared_distance();
  double kernel_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double normalised = dm2 > 0.0 ? scratch_[i] / dm2 : 0.0;
    kernel_sum += config_.kernel_epsilon / (normalised + config_.kernel_epsilon);
  }
  add(embedding);
  return 1.0 / std::sqrt(kernel_sum + config_.kernel_constant);
}

LifelongModulator::LifelongModulator(LifelongConfig config) : config_(config) {
  if (config_.backend == LifelongBackend::random_distillation) {
    if (config_.rnd_output_dim == 0) throw InvalidArgument("RND output dimension must be positive");
    if (!(config_.rnd_learning_rate > 0.0)) throw InvalidArgument("RND learning rate must be positive");
  }
}

double LifelongModulator::alpha(std::span<const double> embedding) {
  return config_.backend == LifelongBackend::count_based ? count_alpha(embedding) : rnd_alpha(embedding);
}

std::uint64_t LifelongModulator::visits(std::span<const double> embedding) const {
  auto it = counts_.find(std::vector<double>(embedding.begin(), embedding.end()));
  return it == counts_.end() ? 0 : it->second;
}

double LifelongModulator::count_alpha(std::span<const double> embedding) {
  const std::uint64_t n = ++counts_[std::vector<double>(embedding.begin(), embedding.end())];
  return 1.0 + 1.0 / std::sqrt(static_cast<double>(n));
}

double LifelongModulator::rnd_alpha(std::span<const double> embedding) {
  const auto dim = static_cast<Eigen::Index>(embedding.size());
  if (target_.size() == 0) {
    // Fixed random projection; the predictor starts at zero.
    Rng rng = make_rng(config_.rnd_seed, 0x524e44);
    std::normal_distribution<double> normal(0.0, 1.0);
    target_.resize(static_cast<Eigen::Index>(config_.rnd_output_dim), dim);
    for (Eigen::Index i = 0; i < target_.size(); ++i) target_.data()[i] = normal(rng);
    predictor_ = Eigen::MatrixXd::Zero(target_.rows(), dim);
  }
  if (target_.cols() != dim) throw DimensionError("RND: embedding size changed");

  const Eigen::Map<const Eigen::VectorXd> x(embedding.data(), dim);
  const Eigen::VectorXd diff = predictor_ * x - target_ * x;
  const double err = diff.squaredNorm();

  // Welford running statistics of the prediction error.
  ++error_count_;
  const double d = err - error_mean_;
  error_mean_ += d / static_cast<double>(error_count_);
  error_m2_ += d * (err - error_mean_);
  const double std_err = error_count_ > 1 ? std::sqrt(error_m2_ / static_cast<double>(error_count_ - 1)) : 0.0;

  predictor_.noalias() -= (2.0 * config_.rnd_learning_rate) * diff * x.transpose();

  if (!(std_err > 0.0)) return 1.0;
  return std::max(0.0, 1.0 + (err - error_mean_) / std_err);
}

double intrinsic_reward(double r_episodic, double alpha, const IntrinsicRewardConfig& cfg) {
  if (!(cfg.clip_max >= 1.0)) throw InvalidArgument("intrinsic reward clip L must be at least 1");
  if (r_episodic < 0.0 || alpha < 0.0) throw InvalidArgument("intrinsic reward inputs must be non-negative");
  return r_episodic * std::min(std::max(alpha, 1.0), cfg.clip_max);
}

}  // namespace famrl
