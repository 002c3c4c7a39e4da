#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qsdr/qmave.hpp"
#include "qsdr/qopg.hpp"
#include "qsdr/sir.hpp"

namespace qsdr {

enum class SimModel { A, B, C, linear_heteroscedastic, custom };
enum class ErrorDist { normal, t3_scaled, chisq1 };
enum class EstimatorKind { qopg, qmave, sir };

SimModel parse_sim_model(const std::string& name);
std::string sim_model_name(SimModel model);
ErrorDist parse_error_dist(const std::string& name);
std::string error_dist_name(ErrorDist dist);
EstimatorKind parse_estimator(const std::string& name);
std::string estimator_name(EstimatorKind kind);

// Declarative Monte Carlo experiment. The seed fully determines every
// replicate through per-replicate substreams.
struct SimSpec {
    SimModel model = SimModel::A;
    int n = 200;
    int p = 10;
    ErrorDist error_dist = ErrorDist::normal;
    int n_replicates = 100;
    std::uint64_t seed = 1;
    std::vector<EstimatorKind> estimators{EstimatorKind::qopg};
    int q = 2;               // structural dimension handed to the estimators
    Eigen::MatrixXd basis0;  // custom / linear_heteroscedastic true directions
    bool select_dimension = false;
    std::vector<int> q_candidates{1, 2, 3};
    QopgConfig qopg;
    QmaveConfig qmave;
    int sir_slices = 0;  // 0 = default_sir_slices(n)
    int threads = 1;
};

struct EstimatorSummary {
    std::vector<double> errors;  // per replicate; NaN marks a failure
    double mean = 0.0;
    double sd = 0.0;
    int n_failed = 0;
    std::vector<std::string> failures;  // "replicate: what()"
    double mean_seconds = 0.0;          // diagnostic only, not part of the
                                        // deterministic report content
};

struct SimReport {
    std::map<EstimatorKind, EstimatorSummary> estimators;
    // dimension selection, when enabled
    std::vector<int> q_selected;  // per replicate, -1 marks a failure
    double dim_correct_freq = 0.0;
    int q_true = 0;
};

// X with i.i.d. N(0, Sigma) rows, sigma_ij = 0.5^{|i-j|}, realized through
// the Cholesky factor applied to inverse-CDF Gaussians of the seeded stream.
Eigen::MatrixXd generate_covariates(int n, int p, std::uint64_t seed);

Eigen::VectorXd sample_error(ErrorDist dist, int n, std::uint64_t seed);

// Y from the model formula, given covariates and errors.
Eigen::VectorXd assemble_response(SimModel model, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& eps, const Eigen::MatrixXd& basis0);

struct ModelData {
    Eigen::MatrixXd X;
    Eigen::VectorXd Y;
    Eigen::MatrixXd B0;  // true directions
};

ModelData generate_model(const SimSpec& spec, int replicate);

// Replicated experiment: per replicate, generate data from the substream,
// run each configured estimator, score against the true directions, and
// aggregate. Failures are recorded and excluded, never silent. The report is
// a pure function of the spec regardless of thread count.
SimReport run_replicates(const SimSpec& spec);

}  // namespace qsdr
