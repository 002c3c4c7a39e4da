#include "qsdr/local_fit.hpp"

#include <stdexcept>
#include <vector>

#include "qsdr/errors.hpp"

namespace qsdr {

LocalFit fit_local_quantile(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                            const Eigen::VectorXd& center, double tau, double h_design,
                            double h_kernel, const MultiIndexSet& A, const KernelSpec& spec,
                            const SolverConfig& solver_cfg,
                            const Eigen::MatrixXd* kernel_directions) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::invalid_argument("fit_local_quantile: tau must lie in (0, 1)");
    }
    if (!(h_design > 0.0 && h_kernel > 0.0)) {
        throw std::invalid_argument("fit_local_quantile: bandwidths must be positive");
    }
    const Eigen::Index n = X.rows();
    const int p = A.p();
    if (X.cols() != p || Y.size() != n || center.size() != p) {
        throw std::invalid_argument("fit_local_quantile: shape mismatch");
    }

    std::vector<Eigen::Index> rows;
    std::vector<double> weights;
    rows.reserve(16);
    for (Eigen::Index i = 0; i < n; ++i) {
        double dist;
        if (kernel_directions != nullptr) {
            dist = (kernel_directions->transpose() * (X.row(i).transpose() - center))
                       .cwiseAbs()
                       .maxCoeff();
        } else {
            dist = (X.row(i).transpose() - center).cwiseAbs().maxCoeff();
        }
        double wi = kernel_weight(dist, h_kernel, spec);
        if (wi > 0.0) {
            rows.push_back(i);
            weights.push_back(wi);
        }
    }

    const int m = static_cast<int>(rows.size());
    if (m < A.size()) {
        throw InsufficientLocalData("local window holds " + std::to_string(m) +
                                    " weighted samples, needs " + std::to_string(A.size()));
    }

    Eigen::MatrixXd D(m, p);
    Eigen::VectorXd y(m), w(m);
    for (int r = 0; r < m; ++r) {
        D.row(r) = X.row(rows[r]) - center.transpose();
        y[r] = Y[rows[r]];
        w[r] = weights[r];
    }

    LocalFit fit;
    fit.center = center;
    fit.tau = tau;
    fit.bandwidth = h_design;
    fit.kernel_bandwidth = h_kernel;
    fit.n_effective = m;

    if ((y.array() - y[0]).abs().maxCoeff() == 0.0) {
        // every response equal: the constant fit is exact
        fit.coeffs = Eigen::VectorXd::Zero(A.size());
        fit.coeffs[0] = y[0];
        fit.objective = 0.0;
        fit.converged = true;
        return fit;
    }

    Eigen::MatrixXd Z = design_matrix(D, h_design, A);
    SolveResult res = solve_weighted_check_loss(Z, y, w, tau, solver_cfg, 0);
    fit.coeffs = res.coeffs;
    fit.objective = res.objective;
    fit.converged = res.converged;
    return fit;
}

Eigen::VectorXd extract_gradient(const LocalFit& fit, const MultiIndexSet& A) {
    if (A.k() < 1) throw OrderTooLow();
    if (fit.coeffs.size() != A.size()) {
        throw std::invalid_argument("extract_gradient: coefficient length mismatch");
    }
    const auto& pos = A.first_order_positions();
    Eigen::VectorXd g(A.p());
    for (int j = 0; j < A.p(); ++j) {
        g[j] = fit.coeffs[pos[j]] / fit.bandwidth;
    }
    return g;
}

}  // namespace qsdr
