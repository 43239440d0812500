#include "famrl/transform.hpp"

#include <cmath>

#include "famrl/errors.hpp"

namespace famrl {

namespace {
double sign(double z) { return (z > 0.0) - (z < 0.0); }
}  // namespace

double h_apply(double z, const SquashTransform& t) {
  if (!std::isfinite(z)) throw DomainError("h_apply: non-finite input");
  return sign(z) * (std::sqrt(std::abs(z) + 1.0) - 1.0) + t.epsilon * z;
}

double h_inverse(double z, const SquashTransform& t) {
  if (!std::isfinite(z)) throw DomainError("h_inverse: non-finite input");
  if (t.epsilon == 0.0) throw DivisionByZeroError("h_inverse: epsilon must be positive");
  const double eps = t.epsilon;
  const double a = std::abs(z) + 1.0 + eps;
  // (sqrt(1 + 4 eps a) - 1) / (2 eps), rationalised to avoid cancellation.
  const double root = 2.0 * a / (std::sqrt(1.0 + 4.0 * eps * a) + 1.0);
  return sign(z) * (root * root - 1.0);
}

}  // namespace famrl
