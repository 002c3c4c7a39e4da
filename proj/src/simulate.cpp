#include "qsdr/simulate.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qsdr/errors.hpp"
#include "qsdr/dimension.hpp"
#include "qsdr/parallel.hpp"
#include "qsdr/rng.hpp"
#include "qsdr/subspace.hpp"

namespace qsdr {

namespace {
// internal stream tags so covariates and errors never share draws
constexpr std::uint64_t kCovariateStream = 0xC00AULL;
constexpr std::uint64_t kErrorStream = 0xE880ULL;
}  // namespace

SimModel parse_sim_model(const std::string& name) {
    if (name == "A" || name == "a") return SimModel::A;
    if (name == "B" || name == "b") return SimModel::B;
    if (name == "C" || name == "c") return SimModel::C;
    if (name == "linear_heteroscedastic") return SimModel::linear_heteroscedastic;
    if (name == "custom") return SimModel::custom;
    throw ConfigError("unknown simulation model: " + name);
}

std::string sim_model_name(SimModel model) {
    switch (model) {
        case SimModel::A: return "A";
        case SimModel::B: return "B";
        case SimModel::C: return "C";
        case SimModel::linear_heteroscedastic: return "linear_heteroscedastic";
        case SimModel::custom: return "custom";
    }
    return "?";
}

ErrorDist parse_error_dist(const std::string& name) {
    if (name == "normal") return ErrorDist::normal;
    if (name == "t3" || name == "t3_scaled") return ErrorDist::t3_scaled;
    if (name == "chisq1" || name == "chisq") return ErrorDist::chisq1;
    throw ConfigError("unknown error distribution: " + name);
}

std::string error_dist_name(ErrorDist dist) {
    switch (dist) {
        case ErrorDist::normal: return "normal";
        case ErrorDist::t3_scaled: return "t3_scaled";
        case ErrorDist::chisq1: return "chisq1";
    }
    return "?";
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "qopg") return EstimatorKind::qopg;
    if (name == "qmave") return EstimatorKind::qmave;
    if (name == "sir") return EstimatorKind::sir;
    throw ConfigError("unknown estimator: " + name);
}

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::qopg: return "qopg";
        case EstimatorKind::qmave: return "qmave";
        case EstimatorKind::sir: return "sir";
    }
    return "?";
}

Eigen::MatrixXd generate_covariates(int n, int p, std::uint64_t seed) {
    if (n < 1 || p < 1) throw std::invalid_argument("generate_covariates: n, p must be >= 1");
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(0.5, std::abs(i - j));
    }
    Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();

    CounterRng rng = CounterRng::substream(seed, kCovariateStream);
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd z(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z[j] = rng.next_normal();
        X.row(i) = (L * z).transpose();
    }
    return X;
}

Eigen::VectorXd sample_error(ErrorDist dist, int n, std::uint64_t seed) {
    CounterRng rng = CounterRng::substream(seed, kErrorStream);
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) {
        switch (dist) {
            case ErrorDist::normal: eps[i] = rng.next_normal(); break;
            case ErrorDist::t3_scaled: eps[i] = rng.next_t3_scaled(); break;
            case ErrorDist::chisq1: eps[i] = rng.next_chisq1(); break;
        }
    }
    return eps;
}

Eigen::VectorXd assemble_response(SimModel model, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& eps, const Eigen::MatrixXd& basis0) {
    const Eigen::Index n = X.rows();
    Eigen::VectorXd Y(n);
    switch (model) {
        case SimModel::A:
            for (Eigen::Index i = 0; i < n; ++i) {
                double x1 = X(i, 0), x2 = X(i, 1);
                Y[i] = x1 * (x1 + x2 + 1.0) + 0.5 * eps[i];
            }
            break;
        case SimModel::B:
            for (Eigen::Index i = 0; i < n; ++i) {
                double x1 = X(i, 0), x2 = X(i, 1);
                double den = 0.5 + (x2 + 1.5) * (x2 + 1.5);
                Y[i] = x1 / den + 0.5 * eps[i];
            }
            break;
        case SimModel::C:
            for (Eigen::Index i = 0; i < n; ++i) {
                Y[i] = X(i, 0) + std::exp(X(i, 1)) * eps[i];
            }
            break;
        case SimModel::linear_heteroscedastic: {
            if (basis0.cols() != 2) {
                throw ConfigError("linear_heteroscedastic needs two direction columns");
            }
            Eigen::VectorXd m = X * basis0.col(0);
            Eigen::VectorXd s = X * basis0.col(1);
            Y = m + s.cwiseProduct(eps);
            break;
        }
        case SimModel::custom:
            throw ConfigError("custom model has no response formula");
    }
    return Y;
}

ModelData generate_model(const SimSpec& spec, int replicate) {
    std::uint64_t rep_seed = mix64(spec.seed ^ mix64(static_cast<std::uint64_t>(replicate)));

    ModelData data;
    data.X = generate_covariates(spec.n, spec.p, rep_seed);

    Eigen::MatrixXd B0;
    if (spec.model == SimModel::A || spec.model == SimModel::B || spec.model == SimModel::C) {
        B0 = Eigen::MatrixXd::Zero(spec.p, 2);
        B0(0, 0) = 1.0;
        B0(1, 1) = 1.0;
    } else if (spec.basis0.size() > 0) {
        B0 = spec.basis0;
    } else {
        B0 = Eigen::MatrixXd::Zero(spec.p, 2);
        B0(0, 0) = 1.0;
        B0(1, 1) = 1.0;
    }

    Eigen::VectorXd eps = sample_error(spec.error_dist, spec.n, rep_seed);
    data.Y = assemble_response(spec.model, data.X, eps, B0);
    data.B0 = B0;
    return data;
}

namespace {

double run_estimator(EstimatorKind kind, const SimSpec& spec, const ModelData& data) {
    CsEstimate est;
    switch (kind) {
        case EstimatorKind::qopg: {
            QopgConfig cfg = spec.qopg;
            cfg.threads = 1;  // replicates own the parallelism
            est = qopg_fit(data.X, data.Y, spec.q, cfg);
            break;
        }
        case EstimatorKind::qmave: {
            QmaveConfig cfg = spec.qmave;
            cfg.threads = 1;
            est = qmave_fit(data.X, data.Y, spec.q, cfg);
            break;
        }
        case EstimatorKind::sir: {
            SirConfig cfg;
            cfg.n_slices = spec.sir_slices > 0 ? spec.sir_slices : default_sir_slices(spec.n);
            cfg.q = spec.q;
            est = sir_fit(data.X, data.Y, cfg);
            break;
        }
    }
    return subspace_error(est.basis, data.B0);
}

}  // namespace

SimReport run_replicates(const SimSpec& spec) {
    if (spec.n_replicates < 1) throw ConfigError("run_replicates: n_replicates must be >= 1");
    if (spec.estimators.empty() && !spec.select_dimension) {
        throw ConfigError("run_replicates: nothing to run");
    }

    const int R = spec.n_replicates;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    SimReport report;
    report.q_true = spec.q;
    for (EstimatorKind kind : spec.estimators) {
        report.estimators[kind].errors.assign(R, nan);
    }
    // per-(estimator, replicate) slots keep the parallel loop race-free and
    // the final report ordering independent of scheduling
    std::vector<std::vector<std::string>> failure_slots(
        spec.estimators.size(), std::vector<std::string>(R));
    std::vector<std::vector<double>> seconds(spec.estimators.size(),
                                             std::vector<double>(R, 0.0));
    if (spec.select_dimension) report.q_selected.assign(R, -1);

    parallel_for(R, spec.threads, [&](int r) {
        ModelData data = generate_model(spec, r);
        for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
            EstimatorKind kind = spec.estimators[e];
            auto t0 = std::chrono::steady_clock::now();
            try {
                double err = run_estimator(kind, spec, data);
                report.estimators[kind].errors[r] = err;
            } catch (const std::exception& ex) {
                report.estimators[kind].errors[r] = nan;
                failure_slots[e][r] = std::to_string(r) + ": " + ex.what();
            }
            seconds[e][r] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        if (spec.select_dimension) {
            try {
                QopgConfig cfg = spec.qopg;
                cfg.threads = 1;
                DimensionSelection sel =
                    select_dimension_cv(data.X, data.Y, spec.q_candidates, cfg);
                report.q_selected[r] = sel.q_hat;
            } catch (const std::exception&) {
                report.q_selected[r] = -1;
            }
        }
    });

    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
        EstimatorSummary& summary = report.estimators[spec.estimators[e]];
        double sum = 0.0;
        int good = 0;
        for (double v : summary.errors) {
            if (std::isfinite(v)) {
                sum += v;
                ++good;
            }
        }
        summary.n_failed = R - good;
        for (const std::string& msg : failure_slots[e]) {
            if (!msg.empty()) summary.failures.push_back(msg);
        }
        summary.mean = good > 0 ? sum / good : nan;
        double ss = 0.0;
        for (double v : summary.errors) {
            if (std::isfinite(v)) ss += (v - summary.mean) * (v - summary.mean);
        }
        summary.sd = good > 1 ? std::sqrt(ss / (good - 1)) : 0.0;
        double total_sec = 0.0;
        for (double s : seconds[e]) total_sec += s;
        summary.mean_seconds = total_sec / R;
    }

    if (spec.select_dimension) {
        int correct = 0;
        for (int qh : report.q_selected) {
            if (qh == spec.q) ++correct;
        }
        report.dim_correct_freq = static_cast<double>(correct) / R;
    }
    return report;
}

}  // namespace qsdr
