#include "qsdr/sir.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <vector>

#include "qsdr/eigen_sym.hpp"
#include "qsdr/errors.hpp"
#include "qsdr/subspace.hpp"

namespace qsdr {

int default_sir_slices(int n) { return n <= 300 ? 8 : 10; }

CsEstimate sir_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const SirConfig& cfg) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    const int S = cfg.n_slices;
    if (S < 2) throw TooFewSlices("sir: need at least 2 slices");
    if (cfg.q < 1 || cfg.q > p) throw ConfigError("sir: q out of range");
    if (n < 2LL * S) {
        throw TooFewSlices("sir: n = " + std::to_string(n) + " cannot give every one of " +
                           std::to_string(S) + " slices two observations");
    }

    Eigen::RowVectorXd mean = X.colwise().mean();
    Eigen::MatrixXd Xc = X.rowwise() - mean;
    Eigen::MatrixXd cov = (Xc.transpose() * Xc) / static_cast<double>(n - 1);

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-10;
        llt.compute(cov);
        if (llt.info() != Eigen::Success) {
            throw DegenerateCovariance("sir: covariance is singular even after ridge");
        }
    }
    // whiten: Z = Xc L^{-T}, so Z has identity covariance
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd Z = L.triangularView<Eigen::Lower>().solve(Xc.transpose()).transpose();

    // slice by the order statistics of Y; stable sort keeps ties deterministic
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return Y[a] < Y[b]; });

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
    for (int s = 0; s < S; ++s) {
        Eigen::Index lo = (n * s) / S;
        Eigen::Index hi = (n * (s + 1)) / S;
        Eigen::Index count = hi - lo;
        if (count < 2) throw TooFewSlices("sir: slice " + std::to_string(s) + " too small");
        Eigen::VectorXd m = Eigen::VectorXd::Zero(p);
        for (Eigen::Index r = lo; r < hi; ++r) m += Z.row(order[r]).transpose();
        m /= static_cast<double>(count);
        M.selfadjointView<Eigen::Lower>().rankUpdate(m, static_cast<double>(count) / n);
    }
    M = M.selfadjointView<Eigen::Lower>();

    SymmetricEigen eig = symmetric_eigen(M);
    // back-transform the leading directions: solve L^T b = v
    Eigen::MatrixXd raw(p, cfg.q);
    for (int k = 0; k < cfg.q; ++k) {
        raw.col(k) =
            L.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors.col(k));
    }

    CsEstimate est;
    est.q = cfg.q;
    est.basis = orthonormal_basis(raw);
    est.eigenvalues = eig.eigenvalues;
    est.iterations = 1;
    est.converged = true;
    return est;
}

}  // namespace qsdr
