#include <doctest.h>

#include <cmath>

#include "qsdr/errors.hpp"
#include "qsdr/rng.hpp"
#include "qsdr/simulate.hpp"
#include "qsdr/subspace.hpp"

using qsdr::CounterRng;
using qsdr::SimSpec;

TEST_CASE("streams are deterministic and distinct") {
    CounterRng a = CounterRng::substream(42, 0);
    CounterRng b = CounterRng::substream(42, 0);
    CounterRng c = CounterRng::substream(42, 1);
    bool all_equal = true, any_equal_c = false;
    for (int i = 0; i < 100; ++i) {
        auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_equal_c = any_equal_c || (va == c.next_u64());
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_c);
}

TEST_CASE("uniforms live strictly inside (0, 1) and average one half") {
    CounterRng rng(99);
    double total = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double u = rng.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        total += u;
    }
    CHECK(std::abs(total / 20000 - 0.5) < 0.01);
}

TEST_CASE("covariate covariance matches the AR structure") {
    Eigen::MatrixXd X = qsdr::generate_covariates(50000, 3, 7);
    Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
    Eigen::MatrixXd cov = Xc.transpose() * Xc / (X.rows() - 1.0);
    CHECK(std::abs(cov(0, 0) - 1.0) < 0.02);
    CHECK(std::abs(cov(1, 1) - 1.0) < 0.02);
    CHECK(std::abs(cov(0, 1) - 0.5) < 0.02);
    CHECK(std::abs(cov(0, 2) - 0.25) < 0.02);

    // determinism
    Eigen::MatrixXd X2 = qsdr::generate_covariates(100, 3, 7);
    CHECK((X.topRows(100) - X2).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd one = qsdr::generate_covariates(20000, 1, 8);
    double var = (one.array() - one.mean()).square().sum() / (one.rows() - 1.0);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("error laws have the stated moments") {
    Eigen::VectorXd t3 = qsdr::sample_error(qsdr::ErrorDist::t3_scaled, 100000, 5);
    double var = (t3.array() - t3.mean()).square().sum() / (t3.size() - 1.0);
    CHECK(std::abs(var - 1.0) < 0.1);

    Eigen::VectorXd chi = qsdr::sample_error(qsdr::ErrorDist::chisq1, 100000, 5);
    CHECK(std::abs(chi.mean() - 1.0) < 0.05);
    CHECK(chi.minCoeff() >= 0.0);

    Eigen::VectorXd again = qsdr::sample_error(qsdr::ErrorDist::chisq1, 100, 5);
    CHECK((chi.head(100) - again).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model formulas") {
    SimSpec spec;
    spec.p = 10;

    // model C with errors forced to zero degenerates to the first coordinate
    Eigen::MatrixXd X = qsdr::generate_covariates(50, 10, 3);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(50);
    Eigen::VectorXd Yc = qsdr::assemble_response(qsdr::SimModel::C, X, zero, {});
    CHECK((Yc - X.col(0)).cwiseAbs().maxCoeff() == 0.0);

    // model A at a row of ones equals 3 + 0.5 eps
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, 10);
    Eigen::VectorXd eps(1);
    eps << 0.8;
    Eigen::VectorXd Ya = qsdr::assemble_response(qsdr::SimModel::A, ones, eps, {});
    CHECK(Ya[0] == doctest::Approx(3.0 + 0.5 * 0.8));

    Eigen::VectorXd Yb = qsdr::assemble_response(qsdr::SimModel::B, ones, eps, {});
    CHECK(Yb[0] == doctest::Approx(1.0 / (0.5 + 6.25) + 0.4));

    // replicate data is a pure function of (seed, replicate)
    auto d1 = qsdr::generate_model(spec, 4);
    auto d2 = qsdr::generate_model(spec, 4);
    CHECK((d1.X - d2.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((d1.Y - d2.Y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d1.B0.cols() == 2);
    auto d3 = qsdr::generate_model(spec, 5);
    CHECK((d1.X - d3.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("replicate harness: determinism across thread counts, sd recompute") {
    SimSpec spec;
    spec.model = qsdr::SimModel::A;
    spec.n = 120;
    spec.n_replicates = 6;
    spec.seed = 11;
    spec.estimators = {qsdr::EstimatorKind::sir};
    spec.threads = 1;
    auto r1 = qsdr::run_replicates(spec);
    spec.threads = 2;
    auto r2 = qsdr::run_replicates(spec);

    const auto& e1 = r1.estimators.at(qsdr::EstimatorKind::sir);
    const auto& e2 = r2.estimators.at(qsdr::EstimatorKind::sir);
    REQUIRE(e1.errors.size() == 6);
    for (int r = 0; r < 6; ++r) CHECK(e1.errors[r] == e2.errors[r]);
    CHECK(e1.mean == e2.mean);
    CHECK(e1.sd == e2.sd);
    CHECK(e1.n_failed == 0);

    // mean and sd recompute from the per-replicate errors
    double mean = 0.0;
    for (double v : e1.errors) mean += v;
    mean /= 6.0;
    double ss = 0.0;
    for (double v : e1.errors) ss += (v - mean) * (v - mean);
    CHECK(std::abs(e1.mean - mean) < 1e-12);
    CHECK(std::abs(e1.sd - std::sqrt(ss / 5.0)) < 1e-12);
}

TEST_CASE("zero replicates is a config error") {
    SimSpec spec;
    spec.n_replicates = 0;
    CHECK_THROWS_AS(qsdr::run_replicates(spec), qsdr::ConfigError);
}
