#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace famrl {

struct FamilySchedule {
  std::size_t num_policies = 32;
  double beta_max = 0.3;
  double gamma0 = 0.9999;
  double gamma1 = 0.997;
  double gamma2 = 0.99;
  /// Sorts the gamma values of j >= 8 in decreasing order.
  bool reverse_gamma_tail = false;
};

/// Throws InvalidArgument unless N >= 2 and 0 < gamma2 <= gamma1 <= gamma0 < 1.
void validate_schedule(const FamilySchedule& sched);

double logistic(double x);

/// 0 at j = 0, beta_max at j = N-1, beta_max * logistic(10 (2j - (N-2)) / (N-2)) between.
double beta_schedule(std::size_t j, const FamilySchedule& sched);

/// gamma0 at j = 0, a logistic blend of gamma1 and gamma0 for 1 <= j <= 6,
/// gamma1 at j = 7, and a log-linear interpolation of 1 - gamma for j >= 8.
/// Throws ScheduleDomainError for j >= 8 when N <= 9.
double gamma_schedule(std::size_t j, const FamilySchedule& sched);

struct FamilyMember {
  double beta = 0.0;
  double gamma = 0.0;
  friend bool operator==(const FamilyMember&, const FamilyMember&) = default;
};

/// The N (beta_j, gamma_j) pairs, exploitative first.
class PolicyFamily {
 public:
  PolicyFamily() = default;
  /// Explicit pairs; requires at least one member, beta >= 0 and gamma in ]0, 1[.
  explicit PolicyFamily(std::vector<FamilyMember> members);

  std::size_t size() const noexcept { return members_.size(); }
  const FamilyMember& operator[](std::size_t j) const { return members_.at(j); }
  double beta(std::size_t j) const { return members_.at(j).beta; }
  double gamma(std::size_t j) const { return members_.at(j).gamma; }
  const std::vector<FamilyMember>& members() const noexcept { return members_; }

 private:
  std::vector<FamilyMember> members_;
};

PolicyFamily build_family(const FamilySchedule& sched = {});

/// CSV with header "j,beta,gamma".
void write_family_csv(std::ostream& out, const PolicyFamily& family);

}  // namespace famrl
