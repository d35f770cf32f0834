#pragma once

#include "mcagg/matrix.hpp"

namespace mcagg {

struct SymmetricEigen {
    Vector values;   // non-increasing
    Matrix vectors;  // column j belongs to values[j]
    int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Iterates until the
/// off-diagonal Frobenius norm drops below `tolerance` (relative to the
/// matrix norm when that exceeds one). Each eigenvector's largest-magnitude
/// component is made positive.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tolerance = 1e-12,
                            int max_sweeps = 100);

}  // namespace mcagg
