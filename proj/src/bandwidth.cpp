#include "qsdr/bandwidth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qsdr/errors.hpp"
#include "qsdr/local_fit.hpp"
#include "qsdr/stats.hpp"

namespace qsdr {

BandwidthRule parse_bandwidth_rule(const std::string& name) {
    if (name == "fixed") return BandwidthRule::fixed;
    if (name == "rot" || name == "rule_of_thumb") return BandwidthRule::rule_of_thumb;
    if (name == "cv" || name == "cv_per_level") return BandwidthRule::cv_per_level;
    if (name == "modified-cv" || name == "modified_cv") return BandwidthRule::modified_cv;
    throw ConfigError("unknown bandwidth rule: " + name);
}

std::string bandwidth_rule_name(BandwidthRule rule) {
    switch (rule) {
        case BandwidthRule::fixed: return "fixed";
        case BandwidthRule::rule_of_thumb: return "rule_of_thumb";
        case BandwidthRule::cv_per_level: return "cv_per_level";
        case BandwidthRule::modified_cv: return "modified_cv";
    }
    return "?";
}

double BandwidthPlan::h_for(double tau) const {
    auto it = per_level.find(tau);
    if (it != per_level.end()) return it->second;
    // nearest level; grids are reconstructed from text in the CLI path
    double best_h = 0.0, best_gap = std::numeric_limits<double>::infinity();
    for (const auto& [t, h] : per_level) {
        double gap = std::abs(t - tau);
        if (gap < best_gap) {
            best_gap = gap;
            best_h = h;
        }
    }
    if (best_gap > 1e-9) {
        throw ConfigError("no bandwidth resolved for tau = " + std::to_string(tau));
    }
    return best_h;
}

double rule_of_thumb_bandwidth(int n, int d, double scale) {
    if (n < 2) throw std::invalid_argument("rule_of_thumb_bandwidth: n must be >= 2");
    if (d < 1) throw std::invalid_argument("rule_of_thumb_bandwidth: d must be >= 1");
    return scale * std::pow(static_cast<double>(n), -1.0 / (d + 4.0));
}

double mean_coordinate_sd(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    if (n < 2) return 1.0;
    Eigen::RowVectorXd mean = X.colwise().mean();
    Eigen::RowVectorXd var =
        (X.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n - 1);
    return var.array().sqrt().mean();
}

std::map<double, double> modified_cv_bandwidths(double h_base,
                                                const std::vector<double>& tau_grid) {
    if (!(h_base > 0.0)) {
        throw std::invalid_argument("modified_cv_bandwidths: h_base must be positive");
    }
    std::map<double, double> out;
    for (double tau : tau_grid) {
        double z = normal_inv_cdf(tau);
        double factor = std::pow(tau * (1.0 - tau) / normal_pdf(z), 0.2);
        out[tau] = h_base * factor;
    }
    return out;
}

std::vector<double> default_h_grid(int n, int d, double spread, double rot_scale) {
    double h_rot = rule_of_thumb_bandwidth(n, d, rot_scale * spread);
    const int count = 10;
    std::vector<double> grid(count);
    double lo = std::log(0.3 * h_rot);
    double hi = std::log(3.0 * h_rot);
    for (int i = 0; i < count; ++i) {
        grid[i] = std::exp(lo + (hi - lo) * i / (count - 1.0));
    }
    return grid;
}

double cv_bandwidth_quantile(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double tau,
                             const std::vector<double>& h_grid, const MultiIndexSet& A,
                             const KernelSpec& spec, const SolverConfig& solver_cfg) {
    if (h_grid.empty()) throw EmptyGrid();
    const Eigen::Index n = X.rows();

    // infeasible windows fall back to the unconditional sample quantile
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    double global_q = weighted_check_loss_argmin_1d(Y, ones, tau);

    double best_h = h_grid.front();
    double best_cv = std::numeric_limits<double>::infinity();
    for (double h : h_grid) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::MatrixXd Xm(n - 1, X.cols());
            Eigen::VectorXd Ym(n - 1);
            Eigen::Index r = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (i == j) continue;
                Xm.row(r) = X.row(i);
                Ym[r] = Y[i];
                ++r;
            }
            double pred;
            try {
                LocalFit fit = fit_local_quantile(Xm, Ym, X.row(j).transpose(), tau, h, h, A,
                                                  spec, solver_cfg);
                pred = fit.coeffs[0];
            } catch (const InsufficientLocalData&) {
                pred = global_q;
            }
            total += check_loss(Y[j] - pred, tau);
        }
        total /= static_cast<double>(n);
        if (total < best_cv) {
            best_cv = total;
            best_h = h;
        }
    }
    return best_h;
}

double mean_abs_dev_cv_bandwidth(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                 const std::vector<double>& h_grid, const KernelSpec& spec) {
    if (h_grid.empty()) throw EmptyGrid();
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();

    Eigen::VectorXd W = (Y.array() - Y.mean()).abs();
    const double w_mean = W.mean();

    double best_h = h_grid.front();
    double best_cv = std::numeric_limits<double>::infinity();
    for (double h : h_grid) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            // local linear least squares on the delete-one window
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p + 1, p + 1);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
            int m = 0;
            Eigen::VectorXd z(p + 1);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (i == j) continue;
                Eigen::VectorXd d = (X.row(i) - X.row(j)).transpose();
                double wk = kernel_weight(d.cwiseAbs().maxCoeff(), h, spec);
                if (wk <= 0.0) continue;
                z[0] = 1.0;
                z.tail(p) = d;
                A.selfadjointView<Eigen::Lower>().rankUpdate(z, wk);
                rhs += wk * W[i] * z;
                ++m;
            }
            double pred;
            if (m < p + 1) {
                pred = w_mean;
            } else {
                A = A.selfadjointView<Eigen::Lower>();
                A.diagonal().array() += 1e-12 * std::max(A.trace() / (p + 1), 1.0);
                Eigen::VectorXd c = A.ldlt().solve(rhs);
                pred = c.allFinite() ? c[0] : w_mean;
            }
            double e = W[j] - pred;
            total += e * e;
        }
        if (total < best_cv) {
            best_cv = total;
            best_h = h;
        }
    }
    return best_h;
}

BandwidthPlan resolve_bandwidth_plan(const BandwidthSelection& sel, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& Y,
                                     const std::vector<double>& tau_grid,
                                     const MultiIndexSet& A, const KernelSpec& spec,
                                     const SolverConfig& solver_cfg) {
    if (tau_grid.empty()) throw ConfigError("resolve_bandwidth_plan: empty tau grid");
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());

    BandwidthPlan plan;
    plan.rule = sel.rule;

    switch (sel.rule) {
        case BandwidthRule::fixed: {
            if (!(sel.fixed_h > 0.0)) throw ConfigError("fixed bandwidth must be positive");
            plan.h_base = sel.fixed_h;
            for (double tau : tau_grid) plan.per_level[tau] = sel.fixed_h;
            break;
        }
        case BandwidthRule::rule_of_thumb: {
            double h = rule_of_thumb_bandwidth(n, p, sel.rot_scale * mean_coordinate_sd(X));
            plan.h_base = h;
            for (double tau : tau_grid) plan.per_level[tau] = h;
            break;
        }
        case BandwidthRule::modified_cv: {
            plan.grid = sel.h_grid.empty()
                            ? default_h_grid(n, p, mean_coordinate_sd(X), sel.rot_scale)
                            : sel.h_grid;
            plan.h_base = mean_abs_dev_cv_bandwidth(X, Y, plan.grid, spec);
            plan.per_level = modified_cv_bandwidths(plan.h_base, tau_grid);
            break;
        }
        case BandwidthRule::cv_per_level: {
            plan.grid = sel.h_grid.empty()
                            ? default_h_grid(n, p, mean_coordinate_sd(X), sel.rot_scale)
                            : sel.h_grid;
            for (double tau : tau_grid) {
                plan.per_level[tau] =
                    cv_bandwidth_quantile(X, Y, tau, plan.grid, A, spec, solver_cfg);
            }
            break;
        }
    }
    return plan;
}

}  // namespace qsdr
