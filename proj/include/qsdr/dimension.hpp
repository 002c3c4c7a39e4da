#pragma once

#include <Eigen/Core>

#include <vector>

#include "qsdr/qopg.hpp"

namespace qsdr {

struct DimensionSelection {
    int q_hat = 0;
    std::vector<double> cv_values;  // aligned with the candidate list
};

// Structural dimension by leave-one-out composite-quantile CV: for each
// candidate q fit directions (qOPG), form delete-one local-constant quantile
// estimates on the projected predictors, and sum the check loss over the tau
// grid and all points. Ties resolve to the smallest q; a candidate whose fit
// fails scores +infinity.
DimensionSelection select_dimension_cv(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                                       const std::vector<int>& q_candidates,
                                       const QopgConfig& cfg);

}  // namespace qsdr
