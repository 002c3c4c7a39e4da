#pragma once

#include <Eigen/Core>

namespace qsdr {

// Orthonormal basis of span(B). Throws RankDeficient when B has column rank
// below its column count.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& B);

// Largest absolute entry of the difference of the two projection matrices
// B (B^T B)^{-1} B^T. Invariant to right-multiplication of either argument by
// an invertible q x q matrix; in [0, 1] for equal column counts.
double subspace_error(const Eigen::MatrixXd& B_hat, const Eigen::MatrixXd& B0);

}  // namespace qsdr
