#include "qsdr/quantile_loss.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qsdr {

namespace {

// interquartile range over rows with positive weight
double weighted_window_iqr(const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    std::vector<double> vals;
    vals.reserve(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (w[i] > 0.0) vals.push_back(y[i]);
    }
    if (vals.size() < 2) return 0.0;
    std::sort(vals.begin(), vals.end());
    auto quantile = [&](double q) {
        double pos = q * (vals.size() - 1);
        auto lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, vals.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return vals[lo] * (1.0 - frac) + vals[hi] * frac;
    };
    return quantile(0.75) - quantile(0.25);
}

double smoothed_check_loss_sum(const Eigen::VectorXd& r, const Eigen::VectorXd& w,
                               const Eigen::VectorXd& taus, double eps) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        total += w[i] * (std::sqrt(r[i] * r[i] + eps * eps) + (2.0 * taus[i] - 1.0) * r[i]);
    }
    return total;
}

Eigen::VectorXd solve_spd(Eigen::MatrixXd A, const Eigen::VectorXd& rhs, double ridge_scale) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    Eigen::VectorXd c;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        c = ldlt.solve(rhs);
        if (c.allFinite()) return c;
    }
    double bump = ridge_scale * (A.trace() / A.cols());
    if (!(bump > 0.0)) bump = ridge_scale;
    A.diagonal().array() += bump;
    c = A.ldlt().solve(rhs);
    if (!c.allFinite()) c.setZero();
    return c;
}

}  // namespace

double weighted_check_loss_argmin_1d(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& taus) {
    // right derivative at c: T + 2 C(c) - W with T = sum w (1 - 2 tau),
    // W = sum w, C(c) = cumulative weight of points <= c; the minimizer is the
    // smallest breakpoint where it turns nonnegative.
    const Eigen::Index n = y.size();
    double W = 0.0, T = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        W += w[i];
        T += w[i] * (1.0 - 2.0 * taus[i]);
    }
    if (!(W > 0.0)) {
        throw std::invalid_argument("weighted_check_loss_argmin_1d: no positive weight");
    }
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return y[a] < y[b]; });
    const double target = (W - T) / 2.0;
    double cum = 0.0;
    for (Eigen::Index idx : order) {
        cum += w[idx];
        if (cum >= target) return y[idx];
    }
    return y[order.back()];
}

double weighted_check_loss_argmin_1d(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                     double tau) {
    return weighted_check_loss_argmin_1d(y, w, Eigen::VectorXd::Constant(y.size(), tau));
}

double weighted_check_loss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, const Eigen::VectorXd& taus,
                           const Eigen::VectorXd& coeffs) {
    Eigen::VectorXd r = y - Z * coeffs;
    double total = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        total += w[i] * check_loss(r[i], taus[i]);
    }
    return total;
}

SolveResult solve_weighted_check_loss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& w, const Eigen::VectorXd& taus,
                                      const SolverConfig& cfg, int intercept_column,
                                      const Eigen::VectorXd* warm_start) {
    const Eigen::Index m = Z.rows();
    const Eigen::Index s = Z.cols();
    if (y.size() != m || w.size() != m || taus.size() != m) {
        throw std::invalid_argument("solve_weighted_check_loss: size mismatch");
    }

    SolveResult best;
    best.objective = std::numeric_limits<double>::infinity();
    auto consider = [&](const Eigen::VectorXd& c) {
        double obj = weighted_check_loss(Z, y, w, taus, c);
        if (obj < best.objective) {
            best.objective = obj;
            best.coeffs = c;
        }
    };

    // constant linear term of the majorizer rhs: Z^T (w .* (2 tau - 1))
    Eigen::VectorXd lin = Z.transpose() * (w.array() * (2.0 * taus.array() - 1.0)).matrix();

    Eigen::VectorXd c(s);
    if (warm_start != nullptr && warm_start->size() == s) {
        c = *warm_start;
    } else {
        Eigen::MatrixXd A = Z.transpose() * w.asDiagonal() * Z;
        c = solve_spd(std::move(A), Z.transpose() * (w.array() * y.array()).matrix(),
                      std::max(cfg.ridge, 1e-12));
    }
    consider(c);

    double eps0 = cfg.eps_start_scale * weighted_window_iqr(y, w);
    if (!(eps0 > cfg.eps_floor)) eps0 = cfg.eps_floor;

    int iter = 0;
    bool tol_met_at_floor = false;
    double eps = eps0;
    while (true) {
        const bool at_floor = eps <= cfg.eps_floor;
        double prev = smoothed_check_loss_sum(y - Z * c, w, taus, eps);
        while (iter < cfg.max_iterations) {
            ++iter;
            Eigen::VectorXd r = y - Z * c;
            Eigen::VectorXd a(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                a[i] = w[i] / std::sqrt(r[i] * r[i] + eps * eps);
            }
            Eigen::MatrixXd A = Z.transpose() * a.asDiagonal() * Z;
            Eigen::VectorXd rhs = Z.transpose() * (a.array() * y.array()).matrix() + lin;
            c = solve_spd(std::move(A), rhs, std::max(cfg.ridge, 1e-12));
            consider(c);
            double cur = smoothed_check_loss_sum(y - Z * c, w, taus, eps);
            if (std::abs(prev - cur) <= cfg.inner_tol * std::max(1.0, std::abs(prev))) {
                if (at_floor) tol_met_at_floor = true;
                break;
            }
            prev = cur;
        }
        if (at_floor || iter >= cfg.max_iterations) break;
        eps = std::max(eps / 2.0, cfg.eps_floor);
    }

    if (intercept_column >= 0 && intercept_column < s) {
        // exact 1-d step: with the other coefficients fixed the loss is
        // piecewise linear in the intercept
        Eigen::VectorXd polished = best.coeffs;
        Eigen::VectorXd partial = y - Z * polished;
        partial += polished[intercept_column] * Z.col(intercept_column);
        polished[intercept_column] = weighted_check_loss_argmin_1d(partial, w, taus);
        consider(polished);

        // pure-quantile candidate; keeps the objective at or below the
        // all-zero coefficient vector's even if the iteration wandered
        Eigen::VectorXd flat = Eigen::VectorXd::Zero(s);
        flat[intercept_column] = weighted_check_loss_argmin_1d(y, w, taus);
        consider(flat);
    }

    best.converged = tol_met_at_floor;
    best.iterations = iter;
    return best;
}

SolveResult solve_weighted_check_loss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& w, double tau,
                                      const SolverConfig& cfg, int intercept_column,
                                      const Eigen::VectorXd* warm_start) {
    return solve_weighted_check_loss(Z, y, w, Eigen::VectorXd::Constant(y.size(), tau), cfg,
                                     intercept_column, warm_start);
}

}  // namespace qsdr
