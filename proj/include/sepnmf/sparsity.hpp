#pragma once

#include "sepnmf/masked_matrix.hpp"

namespace sepnmf {

/// Hoyer sparseness of a vector: (sqrt(n) - |v|_1/|v|_2) / (sqrt(n) - 1).
/// 0 for a uniform vector, 1 for a single spike.
/// Throws LengthOneError (n < 2) and ZeroVectorError.
double hoyer_sparsity(const Vector& v);

/// Closest (in squared distance) non-negative vector to v with the same L2
/// norm and hoyer_sparsity == target, via alternating hyperplane/sphere
/// projections with negative-coordinate zeroing.
/// Requires target in (0,1) and v not all zero.
Vector project_sparsity(const Vector& v, double target);

}  // namespace sepnmf
