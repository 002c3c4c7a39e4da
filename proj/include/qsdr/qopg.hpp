#pragma once

#include <Eigen/Core>

#include <vector>

#include "qsdr/bandwidth.hpp"
#include "qsdr/kernel.hpp"
#include "qsdr/opg.hpp"
#include "qsdr/quantile_loss.hpp"

namespace qsdr {

std::vector<double> default_tau_grid();

struct QopgConfig {
    std::vector<double> tau_grid = default_tau_grid();
    double delta_star = 0.1;
    KernelSpec kernel;
    int order = 1;  // local polynomial degree k
    BandwidthSelection bandwidth;
    // refined-stage kernel bandwidth h = refine_scale * n^{-1/(q+4)} * spread
    double refine_scale = 2.34;
    int max_rounds = 20;
    double tol = 1e-3;  // subspace change between successive rounds
    bool adaptive_weights = true;
    // level weight zeroed when lambda_1 < factor * median over grid of lambda_1
    double weight_threshold_factor = 0.01;
    // a level whose masked fraction exceeds mask_max_fraction gets its kernel
    // bandwidth inflated and is refit, at most mask_refit_attempts times
    double mask_max_fraction = 0.2;
    double mask_bandwidth_inflation = 1.25;
    int mask_refit_attempts = 3;
    SolverConfig solver;
    int threads = 1;
};

// Gradient field at one level: one local polynomial quantile fit per sample
// point. Rows whose window is infeasible are masked invalid.
GradientField compute_gradient_field(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                     double tau, double h_design, double h_kernel,
                                     const MultiIndexSet& A, const KernelSpec& spec,
                                     const SolverConfig& solver_cfg,
                                     const Eigen::MatrixXd* kernel_directions, int threads);

// Adaptive composite quantile OPG estimate of the central subspace.
// Stage one fits gradients with the full-dimensional kernel; later rounds
// project the kernel distance onto the current directions and rebuild the
// weighted composite until the subspace change drops below cfg.tol.
CsEstimate qopg_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int q,
                    const QopgConfig& cfg);

// Single unweighted stage-one pass; the qMAVE initializer.
CsEstimate qopg_stage1(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int q,
                       const QopgConfig& cfg);

}  // namespace qsdr
