#include "qsdr/eigen_sym.hpp"

#include <Eigen/Dense>

#include "qsdr/errors.hpp"

namespace qsdr {

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& M, double symmetry_tol) {
    if (M.rows() != M.cols()) throw NotSymmetric("matrix is not square");
    double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym > symmetry_tol) {
        throw NotSymmetric("max |M - M^T| = " + std::to_string(asym));
    }

    Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success) {
        throw NotSymmetric("eigendecomposition failed to converge");
    }

    const Eigen::Index p = M.rows();
    SymmetricEigen out;
    out.eigenvalues.resize(p);
    out.eigenvectors.resize(p, p);
    // Eigen sorts ascending; flip to descending and fix signs so the
    // largest-magnitude component of each vector is positive.
    for (Eigen::Index k = 0; k < p; ++k) {
        out.eigenvalues[k] = solver.eigenvalues()[p - 1 - k];
        Eigen::VectorXd v = solver.eigenvectors().col(p - 1 - k);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0.0) v = -v;
        out.eigenvectors.col(k) = v;
    }
    return out;
}

}  // namespace qsdr
