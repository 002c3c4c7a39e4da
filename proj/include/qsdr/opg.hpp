#pragma once

#include <Eigen/Core>

#include <vector>

namespace qsdr {

// Per-sample quantile gradient estimates at one level.
struct GradientField {
    double tau = 0.5;
    Eigen::MatrixXd gradients;     // n x p, row j = estimated gradient at X_j
    std::vector<bool> valid_mask;  // rows with false are excluded from averages
};

// Level-specific outer product of gradients matrix.
struct LevelOpg {
    double tau = 0.5;
    Eigen::MatrixXd matrix;       // p x p symmetric PSD
    Eigen::VectorXd eigenvalues;  // descending
    double weight = 0.0;          // adaptive weight in [0, 1]
};

// Weighted, grid-summed composite OPG matrix with its eigendecomposition.
struct CompositeOpg {
    Eigen::MatrixXd matrix;
    std::vector<double> tau_grid;
    double delta_star = 0.1;
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns
    std::vector<double> weights_used;
};

// Orthonormal basis estimate of the central subspace with its diagnostics.
struct CsEstimate {
    Eigen::MatrixXd basis;  // p x q, orthonormal columns
    int q = 0;
    Eigen::VectorXd eigenvalues;  // full spectrum of the final composite matrix
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // successive subspace changes
};

// Fraction of eigenvalue mass carried by the first q eigenvalues,
// (lam_1 + ... + lam_q) / (lam_1 + ... + lam_p); zero when the matrix
// vanishes or lam_1 falls below the threshold.
double level_weight(const Eigen::VectorXd& eigenvalues_desc, int q, double threshold);

// Average of the valid gradient outer products with its adaptive weight.
// Throws NoValidGradients when no row is valid.
LevelOpg level_opg(const GradientField& field, int q, double weight_threshold);

// Weighted grid sum of level matrices: sum_s w_s Sigma(tau_s) when adaptive
// (no normalization by sum of weights), plain grid average otherwise. Throws
// AllWeightsZero when every adaptive weight vanishes.
CompositeOpg composite_opg(const std::vector<LevelOpg>& levels, bool use_adaptive_weights,
                           double delta_star = 0.1);

}  // namespace qsdr
