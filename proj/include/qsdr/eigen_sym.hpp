#pragma once

#include <Eigen/Core>

namespace qsdr {

struct SymmetricEigen {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, one per eigenvalue
};

// Eigendecomposition of a symmetric matrix with a deterministic sign
// convention: the largest-magnitude component of each eigenvector is
// positive. Throws NotSymmetric when max|M - M^T| exceeds symmetry_tol.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& M, double symmetry_tol = 1e-10);

}  // namespace qsdr
