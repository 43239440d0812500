#pragma once

// Data-parallel inner loops shared by the Bellman and Retrace operators.
//
// `famrl::kernels` holds the OpenMP versions used by the library; every
// function has a serial twin in `famrl::reference` with the same per-element
// arithmetic, so both must agree bit for bit.

#include <cstddef>
#include <span>

#include "famrl/mdp.hpp"
#include "famrl/transform.hpp"

namespace famrl::kernels {

/// out[x] = sum_a weights(x, a) * values(x, a)
void weighted_state_sum(const QTable& weights, const QTable& values, std::span<double> out);

/// out(x, a) = base(x, a) + scale * sum_y P(y | x, a) v[y]; `base` may be empty (zeros).
void backup(const TabularMdp& mdp, std::span<const double> base, double scale, std::span<const double> v,
            QTable& out);

/// out[x] = lowest index of the maximal entry of q(x, .)
void greedy_actions(const QTable& q, std::span<std::size_t> out);

/// values[i] = t.apply(values[i]) or t.inverse(values[i]); throws DomainError on non-finite entries.
void transform_values(std::span<double> values, const ValueTransform& t, bool inverse);

}  // namespace famrl::kernels

namespace famrl::reference {

void weighted_state_sum(const QTable& weights, const QTable& values, std::span<double> out);
void backup(const TabularMdp& mdp, std::span<const double> base, double scale, std::span<const double> v,
            QTable& out);
void greedy_actions(const QTable& q, std::span<std::size_t> out);
void transform_values(std::span<double> values, const ValueTransform& t, bool inverse);

}  // namespace famrl::reference
