#pragma once

#include <Eigen/Core>

#include "qsdr/kernel.hpp"
#include "qsdr/multi_index.hpp"
#include "qsdr/quantile_loss.hpp"

namespace qsdr {

// One local polynomial quantile fit and its diagnostics.
struct LocalFit {
    Eigen::VectorXd center;
    double tau = 0.5;
    // design bandwidth; first-order coefficients divided by this give the
    // gradient estimate
    double bandwidth = 0.0;
    double kernel_bandwidth = 0.0;
    Eigen::VectorXd coeffs;  // length s(A)
    int n_effective = 0;     // samples with positive kernel weight
    double objective = 0.0;
    bool converged = false;
};

/// Local polynomial quantile fit at `center`:
///
///   min_c  sum_i rho_tau(Y_i - c^T z_i) K_{h_kernel}(d_i)
///
/// with z_i = design_vector(X_i - center, h_design, A) and d_i the sup norm
/// of X_i - center, or of kernel_directions^T (X_i - center) when directions
/// are supplied. The design always uses the full displacement and h_design.
///
/// Throws InsufficientLocalData when fewer than s(A) samples receive positive
/// kernel weight. A window whose responses are all equal returns the exact
/// constant fit with converged = true.
LocalFit fit_local_quantile(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                            const Eigen::VectorXd& center, double tau, double h_design,
                            double h_kernel, const MultiIndexSet& A, const KernelSpec& spec,
                            const SolverConfig& solver_cfg,
                            const Eigen::MatrixXd* kernel_directions = nullptr);

// The p first-order coefficients in coordinate order divided by the design
// bandwidth. Throws OrderTooLow when A has k = 0.
Eigen::VectorXd extract_gradient(const LocalFit& fit, const MultiIndexSet& A);

}  // namespace qsdr
