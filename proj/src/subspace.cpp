#include "qsdr/subspace.hpp"

#include <Eigen/Dense>

#include "qsdr/errors.hpp"

namespace qsdr {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& B) {
    const Eigen::Index q = B.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    qr.setThreshold(1e-10);
    if (qr.rank() < q) {
        throw RankDeficient("matrix has rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(q) + " columns");
    }
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), q);
    return Q;
}

double subspace_error(const Eigen::MatrixXd& B_hat, const Eigen::MatrixXd& B0) {
    Eigen::MatrixXd Q1 = orthonormal_basis(B_hat);
    Eigen::MatrixXd Q0 = orthonormal_basis(B0);
    Eigen::MatrixXd diff = Q1 * Q1.transpose() - Q0 * Q0.transpose();
    return diff.cwiseAbs().maxCoeff();
}

}  // namespace qsdr
