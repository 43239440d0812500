#pragma once

#include <optional>

namespace famrl {

/// Parameters of the invertible value-squashing function
///   h(z) = sign(z) (sqrt(|z| + 1) - 1) + epsilon z.
struct SquashTransform {
  double epsilon = 1e-3;
};

/// h(z). Throws DomainError for non-finite input.
double h_apply(double z, const SquashTransform& t = {});

/// h^{-1}(z). Requires epsilon > 0 (DivisionByZeroError otherwise).
double h_inverse(double z, const SquashTransform& t = {});

/// Either the squashing function above or the identity. The identity variant
/// exists so that transformed code paths can be checked against the plain ones.
class ValueTransform {
 public:
  ValueTransform() = default;
  explicit ValueTransform(SquashTransform squash) : squash_(squash) {}

  static ValueTransform identity() { return ValueTransform{}; }
  static ValueTransform squash(double epsilon = 1e-3) { return ValueTransform{SquashTransform{epsilon}}; }

  double apply(double z) const { return squash_ ? h_apply(z, *squash_) : z; }
  double inverse(double z) const { return squash_ ? h_inverse(z, *squash_) : z; }
  bool is_identity() const noexcept { return !squash_.has_value(); }

 private:
  std::optional<SquashTransform> squash_;
};

/// Operations that accept an optional transform use the plain formula when it
/// is empty and the h-wrapped formula otherwise.
using OptionalTransform = std::optional<ValueTransform>;

}  // namespace famrl
