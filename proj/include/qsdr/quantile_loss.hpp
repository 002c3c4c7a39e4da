#pragma once

#include <Eigen/Core>

#include <cmath>

namespace qsdr {

// rho_tau(s) = |s| + (2 tau - 1) s. Twice the conventional check function;
// the minimizer is the same.
inline double check_loss(double s, double tau) {
    return std::abs(s) + (2.0 * tau - 1.0) * s;
}

struct SolverConfig {
    // relative change of the smoothed objective that ends an inner loop
    double inner_tol = 1e-10;
    // global cap across all smoothing levels
    int max_iterations = 200;
    // smoothing starts at eps_start_scale * IQR(y) and is halved down to eps_floor
    double eps_floor = 1e-8;
    double eps_start_scale = 1e-2;
    // base Tikhonov term added to the majorizer normal matrix when it is
    // not positive definite, scaled by trace/cols
    double ridge = 1e-8;
};

struct SolveResult {
    Eigen::VectorXd coeffs;
    // exact (unsmoothed) weighted check loss at coeffs
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Exact minimizer of g(c) = sum_i w_i rho_{tau_i}(y_i - c). Piecewise linear
// in c, attained at a data point; returns the smallest such point.
double weighted_check_loss_argmin_1d(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& taus);
double weighted_check_loss_argmin_1d(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                     double tau);

double weighted_check_loss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& taus,
                           const Eigen::VectorXd& coeffs);

/// Weighted (composite) linear quantile regression
///
///   min_c  sum_i w_i rho_{tau_i}(y_i - z_i^T c)
///
/// by majorize-minimize on the eps-smoothed loss sqrt(s^2 + eps^2) +
/// (2 tau - 1) s, eps halved each outer round from eps_start_scale * IQR(y)
/// down to eps_floor, warm started from the weighted least squares fit (or
/// from `warm_start` when given). The reported coefficient vector is the
/// iterate with the smallest exact objective, so the objective never exceeds
/// the warm start's.
///
/// When `intercept_column` >= 0 that column must be constantly one; the final
/// iterate then receives an exact one-dimensional polish of that coefficient,
/// which makes intercept-only fits exact weighted quantiles.
SolveResult solve_weighted_check_loss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& w, const Eigen::VectorXd& taus,
                                      const SolverConfig& cfg, int intercept_column = -1,
                                      const Eigen::VectorXd* warm_start = nullptr);
SolveResult solve_weighted_check_loss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& w, double tau,
                                      const SolverConfig& cfg, int intercept_column = -1,
                                      const Eigen::VectorXd* warm_start = nullptr);

}  // namespace qsdr
