#pragma once

#include "nahmforge/common.hpp"

namespace nahmforge {

struct HermitianEigen {
    RealVec eigenvalues;  // ascending
    Mat unitary;          // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Throws NotHermitianError if the
/// normalized deviation from Hermiticity exceeds tol_herm.
HermitianEigen hermitian_eigen(const Mat& m, double tol_herm = 1e-10);

/// Orthonormal basis of the right null space: columns v with ||m v|| <= tol*||m||.
/// Dimension = number of singular values <= tol * sigma_max. Empty basis allowed.
Mat nullspace(const Mat& m, double tol = 1e-8);

/// Number of singular values <= tol * sigma_max.
Eigen::Index rank_deficiency(const Mat& m, double tol = 1e-8);

}  // namespace nahmforge
