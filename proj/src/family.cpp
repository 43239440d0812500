#include "famrl/family.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "famrl/errors.hpp"

namespace famrl {

void validate_schedule(const FamilySchedule& s) {
  if (s.num_policies < 2) throw InvalidArgument("family schedule needs N >= 2");
  if (!(s.beta_max >= 0.0)) throw InvalidArgument("beta_max must be non-negative");
  if (!(0.0 < s.gamma2 && s.gamma2 <= s.gamma1 && s.gamma1 <= s.gamma0 && s.gamma0 < 1.0))
    throw InvalidArgument("family schedule needs 0 < gamma2 <= gamma1 <= gamma0 < 1");
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

namespace {
void require_index(std::size_t j, const FamilySchedule& s) {
  if (j >= s.num_policies)
    throw InvalidArgument("family index " + std::to_string(j) + " out of range for N=" + std::to_string(s.num_policies));
}

double printed_gamma(std::size_t j, const FamilySchedule& s) {
  if (j == 0) return s.gamma0;
  if (j <= 6) {
    const double x = 10.0 * (2.0 * static_cast<double>(j) - 6.0) / 6.0;
    return s.gamma1 + (s.gamma0 - s.gamma1) * logistic(x);
  }
  if (j == 7) return s.gamma1;
  if (s.num_policies <= 9) throw ScheduleDomainError("gamma schedule for j >= 8 needs N > 9");
  const double n9 = static_cast<double>(s.num_policies) - 9.0;
  const double e = (n9 * std::log(1.0 - s.gamma1) + (static_cast<double>(j) - 8.0) * std::log(1.0 - s.gamma2)) / n9;
  return 1.0 - std::exp(e);
}
}  // namespace

double beta_schedule(std::size_t j, const FamilySchedule& s) {
  validate_schedule(s);
  require_index(j, s);
  if (j == 0) return 0.0;
  if (j == s.num_policies - 1) return s.beta_max;
  const double n2 = static_cast<double>(s.num_policies) - 2.0;
  return s.beta_max * logistic(10.0 * (2.0 * static_cast<double>(j) - n2) / n2);
}

double gamma_schedule(std::size_t j, const FamilySchedule& s) {
  validate_schedule(s);
  require_index(j, s);
  if (!s.reverse_gamma_tail || j < 8) return printed_gamma(j, s);
  // The tail reversed: position j takes the value printed for N - 1 - (j - 8).
  return printed_gamma(s.num_policies - 1 - (j - 8), s);
}

PolicyFamily::PolicyFamily(std::vector<FamilyMember> members) : members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("policy family must not be empty");
  for (const auto& m : members_) {
    if (!(m.beta >= 0.0) || !std::isfinite(m.beta)) throw InvalidArgument("family beta must be finite and >= 0");
    if (!(m.gamma > 0.0 && m.gamma < 1.0)) throw InvalidArgument("family gamma must lie in ]0, 1[");
  }
}

PolicyFamily build_family(const FamilySchedule& s) {
  validate_schedule(s);
  std::vector<FamilyMember> members;
  members.reserve(s.num_policies);
  for (std::size_t j = 0; j < s.num_policies; ++j) members.push_back({beta_schedule(j, s), gamma_schedule(j, s)});
  return PolicyFamily(std::move(members));
}

void write_family_csv(std::ostream& out, const PolicyFamily& family) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "j,beta,gamma\n";
  for (std::size_t j = 0; j < family.size(); ++j) out << j << ',' << family.beta(j) << ',' << family.gamma(j) << '\n';
  out.precision(old);
}

}  // namespace famrl
