#include "qsdr/qmave.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qsdr/errors.hpp"
#include "qsdr/parallel.hpp"
#include "qsdr/qopg.hpp"
#include "qsdr/subspace.hpp"

namespace qsdr {

QmaveConfig::QmaveConfig() : tau_grid(default_tau_grid()) {}

namespace {

struct Neighbor {
    int index;
    double dist;
};

// Pair structure under the kernel distance: for each center, the points
// within the largest per-level bandwidth. With the full-dimensional kernel
// this is fixed for the whole fit; the projected kernel refreshes it each
// round.
std::vector<std::vector<Neighbor>> neighbor_lists(const Eigen::MatrixXd& X, double h_max,
                                                  const Eigen::MatrixXd* projection) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd P = projection ? (X * *projection).eval() : X;
    std::vector<std::vector<Neighbor>> out(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double dist = (P.row(i) - P.row(j)).cwiseAbs().maxCoeff();
            if (dist <= h_max) out[j].push_back({static_cast<int>(i), dist});
        }
    }
    return out;
}

struct DirectionStepResult {
    Eigen::MatrixXd basis;      // p x q orthonormal
    Eigen::MatrixXd transform;  // q x q, b_j -> transform * b_j keeps the criterion
    double objective = 0.0;     // exact criterion at basis/planes before re-expression
};

// Minimize the criterion over vec(B) with local planes fixed. Uses the same
// smoothed-loss majorize-minimize scheme as the local solver; the normal
// matrix accumulates through the Kronecker identity
//   (b (x) x)(b (x) x)^T = (b b^T) (x) (x x^T),
// which shares one x x^T across the tau grid.
DirectionStepResult direction_step_impl(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                        const QmavePlanes& planes,
                                        const std::vector<std::vector<Neighbor>>& neighbors,
                                        const std::vector<std::vector<float>>& level_weights,
                                        const SolverConfig& cfg,
                                        const Eigen::MatrixXd& warm_B, double ridge_factor) {
    const int p = static_cast<int>(X.cols());
    const int q = static_cast<int>(warm_B.cols());
    const int n = static_cast<int>(X.rows());
    const int S = static_cast<int>(planes.tau_grid.size());
    const int dim = p * q;

    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(warm_B.data(), dim);

    std::vector<double> two_tau_minus_one(S);
    for (int s = 0; s < S; ++s) two_tau_minus_one[s] = 2.0 * planes.tau_grid[s] - 1.0;

    // One sweep: true and smoothed objective at `c`, plus the majorizer
    // system for the next iterate.
    auto sweep = [&](double eps, bool build, Eigen::MatrixXd& A, Eigen::VectorXd& rhs,
                     double& true_obj, double& smooth_obj) {
        true_obj = 0.0;
        smooth_obj = 0.0;
        if (build) {
            A.setZero(dim, dim);
            rhs.setZero(dim);
        }
        Eigen::Map<const Eigen::MatrixXd> B(c.data(), p, q);
        Eigen::MatrixXd S_j(q, q);
        Eigen::VectorXd v_j(q);
        Eigen::VectorXd x(p), u(q);
        Eigen::MatrixXd xxt(p, p);
        for (int j = 0; j < n; ++j) {
            const auto& nb = neighbors[j];
            const auto& wlev = level_weights[j];
            for (std::size_t t = 0; t < nb.size(); ++t) {
                const int i = nb[t].index;
                x = (X.row(i) - X.row(j)).transpose();
                u.noalias() = B.transpose() * x;
                S_j.setZero();
                v_j.setZero();
                bool any = false;
                for (int s = 0; s < S; ++s) {
                    if (!planes.feasible[s][j]) continue;
                    double w = wlev[t * S + s];
                    if (w <= 0.0) continue;
                    double ytil = Y[i] - planes.intercepts(s, j);
                    auto b = planes.slopes[s].col(j);
                    double r = ytil - b.dot(u);
                    true_obj += w * (std::abs(r) + two_tau_minus_one[s] * r);
                    double root = std::sqrt(r * r + eps * eps);
                    smooth_obj += w * (root + two_tau_minus_one[s] * r);
                    if (build) {
                        double atil = w / root;
                        S_j.selfadjointView<Eigen::Lower>().rankUpdate(b, atil);
                        v_j += (atil * ytil + w * two_tau_minus_one[s]) * b;
                        any = true;
                    }
                }
                if (build && any) {
                    xxt.noalias() = x * x.transpose();
                    for (int k = 0; k < q; ++k) {
                        for (int l = 0; l <= k; ++l) {
                            A.block(k * p, l * p, p, p) += S_j(k, l) * xxt;
                        }
                        rhs.segment(k * p, p) += v_j[k] * x;
                    }
                }
            }
        }
    };

    double best_obj = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_c = c;
    Eigen::MatrixXd A;
    Eigen::VectorXd rhs;

    double eps0 = cfg.eps_start_scale * (Y.maxCoeff() - Y.minCoeff());
    if (!(eps0 > cfg.eps_floor)) eps0 = cfg.eps_floor;

    int iter = 0;
    double eps = eps0;
    double prev_smooth = std::numeric_limits<double>::infinity();
    bool fresh_level = true;
    while (iter < cfg.max_iterations) {
        ++iter;
        double true_obj = 0.0, smooth_obj = 0.0;
        sweep(eps, true, A, rhs, true_obj, smooth_obj);
        if (true_obj < best_obj) {
            best_obj = true_obj;
            best_c = c;
        }
        bool stalled = !fresh_level && std::abs(prev_smooth - smooth_obj) <=
                                           cfg.inner_tol * std::max(1.0, std::abs(prev_smooth));
        if (stalled) {
            if (eps <= cfg.eps_floor) break;
            eps = std::max(eps / 2.0, cfg.eps_floor);
            fresh_level = true;
            prev_smooth = std::numeric_limits<double>::infinity();
            continue;
        }
        prev_smooth = smooth_obj;
        fresh_level = false;

        Eigen::MatrixXd Afull = A.selfadjointView<Eigen::Lower>();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Afull);
        Eigen::VectorXd c_new;
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            c_new = ldlt.solve(rhs);
        }
        if (c_new.size() == 0 || !c_new.allFinite()) {
            // rank-deficient stacked design
            double bump = ridge_factor * Afull.trace();
            if (!(bump > 0.0)) bump = ridge_factor;
            Afull.diagonal().array() += bump;
            c_new = Afull.ldlt().solve(rhs);
            if (!c_new.allFinite()) break;
        }
        c = c_new;
    }
    {
        double true_obj = 0.0, smooth_obj = 0.0;
        sweep(eps, false, A, rhs, true_obj, smooth_obj);
        if (true_obj < best_obj) {
            best_obj = true_obj;
            best_c = c;
        }
    }

    Eigen::Map<const Eigen::MatrixXd> B_raw(best_c.data(), p, q);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B_raw);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(p, q);
    Eigen::MatrixXd R = qr.matrixR().topLeftCorner(q, q).template triangularView<Eigen::Upper>();
    Eigen::MatrixXd G = R * qr.colsPermutation().transpose();
    // deterministic column signs
    for (int k = 0; k < q; ++k) {
        if (G(k, k) < 0.0) {
            Q.col(k) = -Q.col(k);
            G.row(k) = -G.row(k);
        }
    }

    DirectionStepResult out;
    out.basis = Q;
    out.transform = G;
    out.objective = best_obj;
    return out;
}

std::vector<std::vector<float>> precompute_level_weights(
    const std::vector<std::vector<Neighbor>>& neighbors, const std::vector<double>& bandwidths,
    const KernelSpec& spec) {
    const int S = static_cast<int>(bandwidths.size());
    std::vector<std::vector<float>> out(neighbors.size());
    for (std::size_t j = 0; j < neighbors.size(); ++j) {
        out[j].resize(neighbors[j].size() * S);
        for (std::size_t t = 0; t < neighbors[j].size(); ++t) {
            for (int s = 0; s < S; ++s) {
                out[j][t * S + s] = static_cast<float>(
                    kernel_weight(neighbors[j][t].dist, bandwidths[s], spec));
            }
        }
    }
    return out;
}

}  // namespace

std::pair<double, Eigen::VectorXd> qmave_local_step(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::MatrixXd& B, double tau,
    double h, int center_index, const KernelSpec& spec, bool use_projected_kernel,
    const SolverConfig& solver_cfg, const Eigen::VectorXd* warm_start) {
    const Eigen::Index n = X.rows();
    const int q = static_cast<int>(B.cols());
    if (center_index < 0 || center_index >= n) {
        throw std::invalid_argument("qmave_local_step: center index out of range");
    }

    std::vector<int> rows;
    std::vector<double> weights;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd d = (X.row(i) - X.row(center_index)).transpose();
        double dist = use_projected_kernel ? (B.transpose() * d).cwiseAbs().maxCoeff()
                                           : d.cwiseAbs().maxCoeff();
        double w = kernel_weight(dist, h, spec);
        if (w > 0.0) {
            rows.push_back(static_cast<int>(i));
            weights.push_back(w);
        }
    }
    const int m = static_cast<int>(rows.size());
    if (m < q + 1) {
        throw InsufficientLocalData("qmave window holds " + std::to_string(m) +
                                    " weighted samples, needs " + std::to_string(q + 1));
    }

    Eigen::MatrixXd Z(m, q + 1);
    Eigen::VectorXd y(m), w(m);
    for (int r = 0; r < m; ++r) {
        Eigen::VectorXd d = (X.row(rows[r]) - X.row(center_index)).transpose();
        Z(r, 0) = 1.0;
        Z.row(r).tail(q) = (B.transpose() * d).transpose();
        y[r] = Y[rows[r]];
        w[r] = weights[r];
    }

    SolveResult res = solve_weighted_check_loss(Z, y, w, tau, solver_cfg, 0, warm_start);
    return {res.coeffs[0], res.coeffs.tail(q)};
}

Eigen::MatrixXd qmave_direction_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                     const QmavePlanes& planes, const KernelSpec& spec,
                                     const SolverConfig& solver_cfg,
                                     const Eigen::MatrixXd& warm_B, double ridge_factor,
                                     bool use_projected_kernel) {
    double h_max = *std::max_element(planes.bandwidths.begin(), planes.bandwidths.end());
    auto neighbors =
        neighbor_lists(X, h_max, use_projected_kernel ? &warm_B : nullptr);
    auto weights = precompute_level_weights(neighbors, planes.bandwidths, spec);
    return direction_step_impl(X, Y, planes, neighbors, weights, solver_cfg, warm_B,
                               ridge_factor)
        .basis;
}

double qmave_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                       const QmavePlanes& planes, const Eigen::MatrixXd& B,
                       const KernelSpec& spec, bool use_projected_kernel) {
    const int n = static_cast<int>(X.rows());
    const int S = static_cast<int>(planes.tau_grid.size());
    double total = 0.0;
    for (int s = 0; s < S; ++s) {
        double h = planes.bandwidths[s];
        double tau = planes.tau_grid[s];
        for (int j = 0; j < n; ++j) {
            if (!planes.feasible[s][j]) continue;
            double a = planes.intercepts(s, j);
            const Eigen::VectorXd& b = planes.slopes[s].col(j);
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd d = (X.row(i) - X.row(j)).transpose();
                double dist = use_projected_kernel ? (B.transpose() * d).cwiseAbs().maxCoeff()
                                                   : d.cwiseAbs().maxCoeff();
                double w = kernel_weight(dist, h, spec);
                if (w <= 0.0) continue;
                double r = Y[i] - a - b.dot(B.transpose() * d);
                total += w * check_loss(r, tau);
            }
        }
    }
    return total;
}

CsEstimate qmave_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int q,
                     const QmaveConfig& cfg, QmaveDiagnostics* diag) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const int S = static_cast<int>(cfg.tau_grid.size());
    if (S == 0) throw ConfigError("qmave: empty tau grid");

    // stage-one qOPG eigenvectors initialize the directions
    QopgConfig init_cfg;
    init_cfg.tau_grid = cfg.tau_grid;
    init_cfg.delta_star = cfg.delta_star;
    init_cfg.kernel = cfg.kernel;
    init_cfg.bandwidth = cfg.bandwidth;
    init_cfg.solver = cfg.solver;
    init_cfg.threads = cfg.threads;
    CsEstimate init = qopg_stage1(X, Y, q, init_cfg);

    Eigen::MatrixXd B = init.basis;

    // per-level bandwidths reuse the stage-one plan
    MultiIndexSet A(p, 1);
    BandwidthPlan plan =
        resolve_bandwidth_plan(cfg.bandwidth, X, Y, cfg.tau_grid, A, cfg.kernel, cfg.solver);

    QmavePlanes planes;
    planes.tau_grid = cfg.tau_grid;
    planes.bandwidths.resize(S);
    for (int s = 0; s < S; ++s) planes.bandwidths[s] = plan.h_for(cfg.tau_grid[s]);
    planes.intercepts = Eigen::MatrixXd::Zero(S, n);
    planes.slopes.assign(S, Eigen::MatrixXd::Zero(q, n));
    planes.feasible.assign(S, std::vector<char>(n, 0));

    double h_max = *std::max_element(planes.bandwidths.begin(), planes.bandwidths.end());

    CsEstimate est;
    est.q = q;
    est.eigenvalues = init.eigenvalues;

    double prev_obj = std::numeric_limits<double>::infinity();
    bool have_planes = false;

    for (int round = 1; round <= cfg.max_rounds; ++round) {
        auto neighbors =
            neighbor_lists(X, h_max, cfg.use_projected_kernel ? &B : nullptr);
        auto level_weights = precompute_level_weights(neighbors, planes.bandwidths, cfg.kernel);

        // local steps: independent (center, level) problems
        std::vector<double> objectives(static_cast<std::size_t>(S) * n, 0.0);
        parallel_for(S * n, cfg.threads, [&](int idx) {
            const int s = idx / n;
            const int j = idx % n;
            const auto& nb = neighbors[j];
            std::vector<int> rows;
            std::vector<double> ws;
            for (std::size_t t = 0; t < nb.size(); ++t) {
                double w = level_weights[j][t * S + s];
                if (w > 0.0) {
                    rows.push_back(nb[t].index);
                    ws.push_back(w);
                }
            }
            const int m = static_cast<int>(rows.size());
            if (m < q + 1) {
                planes.feasible[s][j] = 0;
                return;
            }
            Eigen::MatrixXd Z(m, q + 1);
            Eigen::VectorXd y(m), w(m);
            for (int r = 0; r < m; ++r) {
                Eigen::VectorXd d = (X.row(rows[r]) - X.row(j)).transpose();
                Z(r, 0) = 1.0;
                Z.row(r).tail(q) = (B.transpose() * d).transpose();
                y[r] = Y[rows[r]];
                w[r] = ws[r];
            }
            Eigen::VectorXd warm(q + 1);
            const Eigen::VectorXd* warm_ptr = nullptr;
            if (have_planes && planes.feasible[s][j]) {
                warm[0] = planes.intercepts(s, j);
                warm.tail(q) = planes.slopes[s].col(j);
                warm_ptr = &warm;
            }
            SolveResult res =
                solve_weighted_check_loss(Z, y, w, cfg.tau_grid[s], cfg.solver, 0, warm_ptr);
            planes.intercepts(s, j) = res.coeffs[0];
            planes.slopes[s].col(j) = res.coeffs.tail(q);
            planes.feasible[s][j] = 1;
            objectives[idx] = res.objective;
        });
        have_planes = true;

        double obj = 0.0;
        for (double v : objectives) obj += v;
        if (diag != nullptr) diag->objective_trace.push_back(obj);
        est.iterations = round;

        if (std::abs(prev_obj - obj) <= cfg.objective_tol * std::max(1.0, std::abs(prev_obj))) {
            est.converged = true;
            break;
        }
        prev_obj = obj;
        if (round == cfg.max_rounds) break;

        DirectionStepResult step = direction_step_impl(
            X, Y, planes, neighbors, level_weights, cfg.solver, B, cfg.ridge_factor);
        est.trace.push_back(subspace_error(step.basis, B));
        B = step.basis;
        // re-express the slopes in the new orthonormal coordinates
        for (int s = 0; s < S; ++s) {
            planes.slopes[s] = step.transform * planes.slopes[s];
        }
    }

    est.basis = B;
    return est;
}

}  // namespace qsdr
