#pragma once

#include <Eigen/Core>

#include <vector>

#include "qsdr/bandwidth.hpp"
#include "qsdr/kernel.hpp"
#include "qsdr/opg.hpp"
#include "qsdr/quantile_loss.hpp"

namespace qsdr {

struct QmaveConfig {
    std::vector<double> tau_grid;  // defaults to {0.1, ..., 0.9}
    double delta_star = 0.1;
    KernelSpec kernel;
    BandwidthSelection bandwidth;
    // kernel distance |B^T X_ij| instead of |X_ij|
    bool use_projected_kernel = false;
    int max_rounds = 50;
    double objective_tol = 1e-6;  // relative objective change across rounds
    double ridge_factor = 1e-8;   // times trace, for rank-deficient direction steps
    SolverConfig solver;
    int threads = 1;

    QmaveConfig();
};

// Local intercepts and slopes for every (center, level) pair, expressed in
// the coordinates of the current direction matrix B.
struct QmavePlanes {
    std::vector<double> tau_grid;
    std::vector<double> bandwidths;          // per level
    Eigen::MatrixXd intercepts;              // levels x centers, a_j(tau)
    std::vector<Eigen::MatrixXd> slopes;     // per level: q x centers, b_j(tau)
    std::vector<std::vector<char>> feasible; // per level, per center
};

// Minimize sum_i rho_tau(Y_i - a - b^T B^T X_ij) K_h(d_ij) over (a, b) with B
// fixed; d_ij = |X_ij| or |B^T X_ij| per flag. Throws InsufficientLocalData
// when fewer than q + 1 samples receive positive weight.
std::pair<double, Eigen::VectorXd> qmave_local_step(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::MatrixXd& B, double tau,
    double h, int center_index, const KernelSpec& spec, bool use_projected_kernel,
    const SolverConfig& solver_cfg, const Eigen::VectorXd* warm_start = nullptr);

// Minimize the same criterion over B with all local planes held fixed: one
// composite quantile regression in the p*q entries of B, orthonormalized by
// QR before return.
Eigen::MatrixXd qmave_direction_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                     const QmavePlanes& planes, const KernelSpec& spec,
                                     const SolverConfig& solver_cfg,
                                     const Eigen::MatrixXd& warm_B,
                                     double ridge_factor = 1e-8,
                                     bool use_projected_kernel = false);

// Exact integrated local check loss of (B, planes) on the tau grid.
double qmave_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                       const QmavePlanes& planes, const Eigen::MatrixXd& B,
                       const KernelSpec& spec, bool use_projected_kernel);

struct QmaveDiagnostics {
    std::vector<double> objective_trace;  // one entry per alternation round
};

// Composite quantile MAVE: alternate local steps over all (center, level)
// pairs with a global direction step, starting from the unweighted stage-one
// qOPG eigenvectors, until the objective stalls.
CsEstimate qmave_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int q,
                     const QmaveConfig& cfg, QmaveDiagnostics* diag = nullptr);

}  // namespace qsdr
