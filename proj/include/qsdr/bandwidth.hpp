#pragma once

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

#include "qsdr/kernel.hpp"
#include "qsdr/multi_index.hpp"
#include "qsdr/quantile_loss.hpp"

namespace qsdr {

enum class BandwidthRule { fixed, rule_of_thumb, cv_per_level, modified_cv };

BandwidthRule parse_bandwidth_rule(const std::string& name);
std::string bandwidth_rule_name(BandwidthRule rule);

// How to pick stage-one bandwidths; resolved into a BandwidthPlan against data.
struct BandwidthSelection {
    BandwidthRule rule = BandwidthRule::modified_cv;
    double fixed_h = 0.0;    // used by rule == fixed
    double rot_scale = 2.34; // Epanechnikov rule-of-thumb constant
    std::vector<double> h_grid;  // CV candidates; empty = default log-spaced grid
};

// Resolved bandwidths, one per quantile level.
struct BandwidthPlan {
    BandwidthRule rule = BandwidthRule::modified_cv;
    double h_base = 0.0;                 // fixed h or the CV base bandwidth
    std::map<double, double> per_level;  // tau -> h
    std::vector<double> grid;            // candidate values searched

    double h_for(double tau) const;
};

// h = scale * n^{-1/(d+4)}; callers fold the data spread into `scale`.
double rule_of_thumb_bandwidth(int n, int d, double scale);

// Mean coordinate standard deviation, the spread factor of the
// rule-of-thumb bandwidth.
double mean_coordinate_sd(const Eigen::MatrixXd& X);

// h_tau = h_base * { tau (1 - tau) / phi(Phi^{-1}(tau)) }^{1/5}
std::map<double, double> modified_cv_bandwidths(double h_base,
                                                const std::vector<double>& tau_grid);

// Ten log-spaced candidates from 0.3 h_rot to 3 h_rot.
std::vector<double> default_h_grid(int n, int d, double spread, double rot_scale = 2.34);

// Level-specific leave-one-out CV bandwidth: argmin over h_grid of the mean
// check loss of delete-one local polynomial quantile predictions. Points
// whose window is infeasible contribute the unconditional sample-quantile
// loss. Throws EmptyGrid.
double cv_bandwidth_quantile(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double tau,
                             const std::vector<double>& h_grid, const MultiIndexSet& A,
                             const KernelSpec& spec, const SolverConfig& solver_cfg);

// Leave-one-out least-squares CV for local linear mean regression of
// |Y - mean(Y)| on X; the base bandwidth of the modified CV rule.
double mean_abs_dev_cv_bandwidth(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                 const std::vector<double>& h_grid, const KernelSpec& spec);

// Resolve a selection against data to per-level bandwidths.
BandwidthPlan resolve_bandwidth_plan(const BandwidthSelection& sel, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& Y,
                                     const std::vector<double>& tau_grid,
                                     const MultiIndexSet& A, const KernelSpec& spec,
                                     const SolverConfig& solver_cfg);

}  // namespace qsdr
