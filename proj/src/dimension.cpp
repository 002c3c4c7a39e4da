#include "qsdr/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qsdr/errors.hpp"
#include "qsdr/parallel.hpp"
#include "qsdr/quantile_loss.hpp"

namespace qsdr {

namespace {

// CV(q): delete-one local-constant quantile predictions on the projected
// predictors, check loss summed over the tau grid and every point.
double cv_value(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                const Eigen::MatrixXd& basis, const QopgConfig& cfg) {
    const Eigen::Index n = X.rows();
    const int q = static_cast<int>(basis.cols());
    Eigen::MatrixXd P = X * basis;

    double spread = mean_coordinate_sd(P);
    if (!(spread > 0.0)) spread = 1.0;
    double h = rule_of_thumb_bandwidth(static_cast<int>(n), q, cfg.refine_scale * spread);

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const std::size_t S = cfg.tau_grid.size();
    std::vector<double> global_q(S);
    for (std::size_t s = 0; s < S; ++s) {
        global_q[s] = weighted_check_loss_argmin_1d(Y, ones, cfg.tau_grid[s]);
    }

    std::vector<double> totals(n, 0.0);
    parallel_for(static_cast<int>(n), cfg.threads, [&](int j) {
        std::vector<double> ys, ws;
        ys.reserve(32);
        ws.reserve(32);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) continue;
            double dist = (P.row(i) - P.row(j)).cwiseAbs().maxCoeff();
            double w = kernel_weight(dist, h, cfg.kernel);
            if (w > 0.0) {
                ys.push_back(Y[i]);
                ws.push_back(w);
            }
        }
        double total = 0.0;
        if (ys.empty()) {
            for (std::size_t s = 0; s < S; ++s) {
                total += check_loss(Y[j] - global_q[s], cfg.tau_grid[s]);
            }
        } else {
            Eigen::Map<Eigen::VectorXd> yv(ys.data(), static_cast<Eigen::Index>(ys.size()));
            Eigen::Map<Eigen::VectorXd> wv(ws.data(), static_cast<Eigen::Index>(ws.size()));
            for (std::size_t s = 0; s < S; ++s) {
                double pred = weighted_check_loss_argmin_1d(yv, wv, cfg.tau_grid[s]);
                total += check_loss(Y[j] - pred, cfg.tau_grid[s]);
            }
        }
        totals[j] = total;
    });

    double cv = 0.0;
    for (double t : totals) cv += t;
    return cv;
}

}  // namespace

DimensionSelection select_dimension_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                       const std::vector<int>& q_candidates,
                                       const QopgConfig& cfg) {
    if (q_candidates.empty()) throw ConfigError("select_dimension_cv: no candidates");

    DimensionSelection out;
    out.cv_values.assign(q_candidates.size(), std::numeric_limits<double>::infinity());

    for (std::size_t idx = 0; idx < q_candidates.size(); ++idx) {
        try {
            CsEstimate est = qopg_fit(X, Y, q_candidates[idx], cfg);
            out.cv_values[idx] = cv_value(X, Y, est.basis, cfg);
        } catch (const Error&) {
            // failed candidates stay at +infinity
        }
    }

    // ties resolve to the smallest candidate
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < q_candidates.size(); ++idx) {
        bool better = out.cv_values[idx] < out.cv_values[best];
        bool tie_smaller = out.cv_values[idx] == out.cv_values[best] &&
                           q_candidates[idx] < q_candidates[best];
        if (better || tie_smaller) best = idx;
    }
    if (std::isinf(out.cv_values[best])) {
        throw NumericalError("select_dimension_cv: every candidate failed");
    }
    out.q_hat = q_candidates[best];
    return out;
}

}  // namespace qsdr
