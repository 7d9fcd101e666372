#pragma once

#include <vector>

#include "tenas/matrix.hpp"

namespace tenas::metrics {

/// Eigenvalues of a symmetric matrix, descending, by cyclic Jacobi
/// rotations. Sweeps until the off-diagonal Frobenius norm drops below
/// 1e-12 of the matrix norm.
///
/// Throws InvalidArgument if the matrix is not square or its relative
/// asymmetry exceeds 1e-8.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

}  // namespace tenas::metrics
