#include "qsdr/qopg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qsdr/errors.hpp"
#include "qsdr/local_fit.hpp"
#include "qsdr/parallel.hpp"
#include "qsdr/subspace.hpp"

namespace qsdr {

std::vector<double> default_tau_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

GradientField compute_gradient_field(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                     double tau, double h_design, double h_kernel,
                                     const MultiIndexSet& A, const KernelSpec& spec,
                                     const SolverConfig& solver_cfg,
                                     const Eigen::MatrixXd* kernel_directions, int threads) {
    const Eigen::Index n = X.rows();
    GradientField field;
    field.tau = tau;
    field.gradients = Eigen::MatrixXd::Zero(n, X.cols());
    field.valid_mask.assign(n, false);

    parallel_for(static_cast<int>(n), threads, [&](int j) {
        try {
            LocalFit fit = fit_local_quantile(X, Y, X.row(j).transpose(), tau, h_design,
                                              h_kernel, A, spec, solver_cfg,
                                              kernel_directions);
            field.gradients.row(j) = extract_gradient(fit, A).transpose();
            field.valid_mask[j] = true;
        } catch (const InsufficientLocalData&) {
            // masked out of this level's average
        }
    });
    return field;
}

namespace {

double masked_fraction(const GradientField& field) {
    std::size_t masked = 0;
    for (bool v : field.valid_mask) {
        if (!v) ++masked;
    }
    return static_cast<double>(masked) / static_cast<double>(field.valid_mask.size());
}

// One full pass over the tau grid: gradient fields (with the masked-level
// bandwidth fallback), level matrices, threshold, weights.
std::vector<LevelOpg> build_levels(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                   const std::vector<double>& h_design,
                                   const std::vector<double>& h_kernel, int q,
                                   const MultiIndexSet& A, const QopgConfig& cfg,
                                   const Eigen::MatrixXd* directions) {
    const std::size_t S = cfg.tau_grid.size();
    std::vector<LevelOpg> levels(S);

    for (std::size_t s = 0; s < S; ++s) {
        double hk = h_kernel[s];
        GradientField field;
        for (int attempt = 0;; ++attempt) {
            field = compute_gradient_field(X, Y, cfg.tau_grid[s], h_design[s], hk, A,
                                           cfg.kernel, cfg.solver, directions, cfg.threads);
            if (masked_fraction(field) <= cfg.mask_max_fraction ||
                attempt >= cfg.mask_refit_attempts) {
                break;
            }
            hk *= cfg.mask_bandwidth_inflation;
        }
        levels[s] = level_opg(field, q, 0.0);  // weights thresholded below
    }

    // threshold = factor * median over the grid of lambda_1
    std::vector<double> lam1(S);
    for (std::size_t s = 0; s < S; ++s) lam1[s] = levels[s].eigenvalues[0];
    std::vector<double> sorted = lam1;
    std::nth_element(sorted.begin(), sorted.begin() + S / 2, sorted.end());
    double median = sorted[S / 2];
    if (S % 2 == 0) {
        double lower = *std::max_element(sorted.begin(), sorted.begin() + S / 2);
        median = 0.5 * (median + lower);
    }
    double threshold = cfg.weight_threshold_factor * median;
    for (auto& level : levels) {
        level.weight = level_weight(level.eigenvalues, q, threshold);
    }
    return levels;
}

CsEstimate run_qopg(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int q,
                    const QopgConfig& cfg, bool adaptive, int max_rounds) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (cfg.order < 1) throw ConfigError("qopg: polynomial order must be >= 1");
    if (q < 1 || q >= p) throw ConfigError("qopg: q must satisfy 1 <= q < p");
    if (cfg.tau_grid.empty()) throw ConfigError("qopg: empty tau grid");
    for (double tau : cfg.tau_grid) {
        if (tau < cfg.delta_star - 1e-12 || tau > 1.0 - cfg.delta_star + 1e-12) {
            throw ConfigError("qopg: tau grid leaves [delta*, 1 - delta*]");
        }
    }

    MultiIndexSet A(p, cfg.order);
    if (n <= A.size()) {
        throw InsufficientData("qopg: n = " + std::to_string(n) +
                               " does not exceed s(A) = " + std::to_string(A.size()));
    }

    BandwidthPlan plan =
        resolve_bandwidth_plan(cfg.bandwidth, X, Y, cfg.tau_grid, A, cfg.kernel, cfg.solver);
    const std::size_t S = cfg.tau_grid.size();
    std::vector<double> h_stage1(S);
    for (std::size_t s = 0; s < S; ++s) h_stage1[s] = plan.h_for(cfg.tau_grid[s]);

    CsEstimate est;
    est.q = q;

    Eigen::MatrixXd basis;
    double h_refined = 0.0;
    for (int round = 1; round <= max_rounds; ++round) {
        std::vector<double> h_kernel = h_stage1;
        const Eigen::MatrixXd* directions = nullptr;
        if (round > 1) {
            h_kernel.assign(S, h_refined);
            directions = &basis;
        }

        std::vector<LevelOpg> levels =
            build_levels(X, Y, h_stage1, h_kernel, q, A, cfg, directions);
        CompositeOpg composite = composite_opg(levels, adaptive, cfg.delta_star);

        Eigen::MatrixXd new_basis = composite.eigenvectors.leftCols(q);
        est.eigenvalues = composite.eigenvalues;
        est.iterations = round;

        if (round > 1) {
            double change = subspace_error(new_basis, basis);
            est.trace.push_back(change);
            basis = new_basis;
            if (change < cfg.tol) {
                est.converged = true;
                break;
            }
        } else {
            basis = new_basis;
        }

        double spread = mean_coordinate_sd(X * basis);
        if (!(spread > 0.0)) spread = 1.0;
        h_refined = rule_of_thumb_bandwidth(n, q, cfg.refine_scale * spread);
    }

    est.basis = basis;
    return est;
}

}  // namespace

CsEstimate qopg_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int q,
                    const QopgConfig& cfg) {
    return run_qopg(X, Y, q, cfg, cfg.adaptive_weights, cfg.max_rounds);
}

CsEstimate qopg_stage1(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int q,
                       const QopgConfig& cfg) {
    return run_qopg(X, Y, q, cfg, false, 1);
}

}  // namespace qsdr
