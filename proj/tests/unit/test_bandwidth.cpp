#include <doctest.h>

#include <cmath>

#include "qsdr/bandwidth.hpp"
#include "qsdr/errors.hpp"
#include "qsdr/qopg.hpp"
#include "qsdr/rng.hpp"
#include "qsdr/stats.hpp"

namespace {

double inv_cdf_bisect(double tau) {
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < tau ? lo : hi) = mid;
        if (hi - lo < 1e-14) break;
    }
    return 0.5 * (lo + hi);
}

// closed-form factor, evaluated independently of the library path
double level_factor_oracle(double tau) {
    double z = inv_cdf_bisect(tau);
    double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return std::pow(tau * (1.0 - tau) / phi, 0.2);
}

}  // namespace

TEST_CASE("rule-of-thumb bandwidth closed forms") {
    CHECK(qsdr::rule_of_thumb_bandwidth(200, 1, 1.0) ==
          doctest::Approx(std::pow(200.0, -0.2)).epsilon(1e-12));
    CHECK(std::abs(qsdr::rule_of_thumb_bandwidth(200, 1, 1.0) - 0.3466) < 1e-4);
    CHECK(qsdr::rule_of_thumb_bandwidth(400, 1, 1.0) <
          qsdr::rule_of_thumb_bandwidth(200, 1, 1.0));
    CHECK(qsdr::rule_of_thumb_bandwidth(128, 10, 1.0) ==
          doctest::Approx(std::pow(128.0, -1.0 / 14.0)).epsilon(1e-12));
}

TEST_CASE("modified CV level bandwidths match the closed-form oracle") {
    auto grid = qsdr::default_tau_grid();
    auto per_level = qsdr::modified_cv_bandwidths(1.0, grid);

    // frozen oracle value at the median level
    double oracle_half = level_factor_oracle(0.5);
    CHECK(oracle_half == doctest::Approx(0.9107643).epsilon(1e-6));
    CHECK(std::abs(per_level[0.5] - oracle_half) < 1e-4);
    CHECK(std::abs(per_level[0.5] - 0.9107643) < 1e-4);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(per_level[grid[i]] - level_factor_oracle(grid[i])) < 1e-6);
        // symmetric in tau <-> 1 - tau, paired through the grid itself
        CHECK(std::abs(per_level[grid[i]] - per_level[grid[grid.size() - 1 - i]]) < 1e-12);
    }

    // the level factor shrinks toward the tails (oracle-resolved direction)
    CHECK(level_factor_oracle(0.1) < level_factor_oracle(0.3));
    CHECK(per_level[0.1] < per_level[0.3]);
    CHECK(level_factor_oracle(0.3) < level_factor_oracle(0.5));

    // deterministic elementwise transform of h_base
    auto again = qsdr::modified_cv_bandwidths(1.0, grid);
    for (double tau : grid) CHECK(again[tau] == per_level[tau]);
    auto scaled = qsdr::modified_cv_bandwidths(2.0, grid);
    for (double tau : grid) CHECK(scaled[tau] == doctest::Approx(2.0 * per_level[tau]));
}

TEST_CASE("single-candidate grids select that candidate and empty grids throw") {
    qsdr::CounterRng rng(71);
    int n = 24;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 2.0 * rng.next_uniform() - 1.0;
        Y[i] = X(i, 0) + 0.2 * rng.next_normal();
    }
    qsdr::MultiIndexSet A(1, 1);
    qsdr::KernelSpec spec;
    qsdr::SolverConfig solver;
    CHECK(qsdr::cv_bandwidth_quantile(X, Y, 0.5, {0.8}, A, spec, solver) == 0.8);
    CHECK(qsdr::mean_abs_dev_cv_bandwidth(X, Y, {1.1}, spec) == 1.1);
    CHECK_THROWS_AS(qsdr::cv_bandwidth_quantile(X, Y, 0.5, {}, A, spec, solver),
                    qsdr::EmptyGrid);
    CHECK_THROWS_AS(qsdr::mean_abs_dev_cv_bandwidth(X, Y, {}, spec), qsdr::EmptyGrid);
}

TEST_CASE("mean-abs-dev CV is shift invariant in the response") {
    qsdr::CounterRng rng(72);
    int n = 50;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 2.0 * rng.next_uniform() - 1.0;
        Y[i] = std::sin(3.0 * X(i, 0)) + 0.3 * rng.next_normal();
    }
    auto grid = qsdr::default_h_grid(n, 1, 1.0);
    qsdr::KernelSpec spec;
    double h0 = qsdr::mean_abs_dev_cv_bandwidth(X, Y, grid, spec);
    double h1 = qsdr::mean_abs_dev_cv_bandwidth(X, (Y.array() + 11.5).matrix(), grid, spec);
    CHECK(h0 == h1);
}

TEST_CASE("quantile CV is invariant to sample order") {
    qsdr::CounterRng rng(73);
    int n = 30;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 2.0 * rng.next_uniform() - 1.0;
        Y[i] = X(i, 0) * X(i, 0) + 0.2 * rng.next_normal();
    }
    qsdr::MultiIndexSet A(1, 1);
    qsdr::KernelSpec spec;
    qsdr::SolverConfig solver;
    std::vector<double> grid{0.4, 0.8, 1.6};
    double h = qsdr::cv_bandwidth_quantile(X, Y, 0.3, grid, A, spec, solver);

    Eigen::MatrixXd Xr = X.colwise().reverse();
    Eigen::VectorXd Yr = Y.reverse();
    CHECK(qsdr::cv_bandwidth_quantile(Xr, Yr, 0.3, grid, A, spec, solver) == h);
}

TEST_CASE("plan resolution fills every level") {
    qsdr::CounterRng rng(74);
    int n = 40;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd Y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = rng.next_normal();
        X(i, 1) = rng.next_normal();
        Y[i] = X(i, 0) + 0.3 * rng.next_normal();
    }
    qsdr::MultiIndexSet A(2, 1);
    qsdr::KernelSpec spec;
    qsdr::SolverConfig solver;
    auto grid = qsdr::default_tau_grid();

    qsdr::BandwidthSelection sel;
    sel.rule = qsdr::BandwidthRule::fixed;
    sel.fixed_h = 0.9;
    auto plan = qsdr::resolve_bandwidth_plan(sel, X, Y, grid, A, spec, solver);
    for (double tau : grid) CHECK(plan.h_for(tau) == 0.9);

    sel.rule = qsdr::BandwidthRule::modified_cv;
    plan = qsdr::resolve_bandwidth_plan(sel, X, Y, grid, A, spec, solver);
    CHECK(plan.h_base > 0.0);
    for (double tau : grid) {
        CHECK(plan.h_for(tau) ==
              doctest::Approx(plan.h_base * level_factor_oracle(tau)).epsilon(1e-6));
    }
}
