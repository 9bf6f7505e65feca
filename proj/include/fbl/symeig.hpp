#pragma once

// Symmetric eigensolvers: Householder tridiagonalization, implicit-shift QL
// on the tridiagonal form, and inverse iteration for selected eigenvectors
// of large tridiagonal matrices.

#include <cstddef>
#include <span>
#include <vector>

#include "fbl/matrix.hpp"

namespace fbl::linalg {

struct EigenPairs {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub/super-diagonal `off` (off[i] couples i and i+1). Ascending.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag,
                                            std::span<const double> off);

/// #{k : lambda_k <= x} (inclusive) or #{k : lambda_k < x} by Sturm sequence.
std::size_t tridiagonal_count(std::span<const double> diag, std::span<const double> off, double x,
                              bool inclusive = true);

/// Eigenvalues <= cutoff by bisection on Sturm counts, ascending, to about
/// machine precision relative to the matrix norm. O(n) per count.
std::vector<double> tridiagonal_eigenvalues_below(std::span<const double> diag, std::span<const double> off,
                                                  double cutoff);

/// Full eigendecomposition of a symmetric tridiagonal matrix (QL with vector
/// accumulation). O(n^3); meant for small n.
EigenPairs tridiagonal_eigen(std::span<const double> diag, std::span<const double> off);

/// Unit eigenvectors for the given (accurate, ascending) eigenvalues by
/// inverse iteration with partial pivoting. Vectors of eigenvalues closer
/// than the cluster tolerance are reorthogonalized against each other.
Matrix tridiagonal_eigenvectors(std::span<const double> diag, std::span<const double> off,
                                std::span<const double> eigenvalues);

/// Dense symmetric matrix; only the lower triangle is read.
std::vector<double> symmetric_eigenvalues(Matrix a);
EigenPairs symmetric_eigen(Matrix a);

}  // namespace fbl::linalg
