#pragma once

#include <Eigen/Core>

#include "qsdr/opg.hpp"

namespace qsdr {

struct SirConfig {
    int n_slices = 8;
    int q = 2;
};

// Slice count used in the simulation study: 8 up to n = 300, 10 beyond.
int default_sir_slices(int n);

// Sliced inverse regression: standardize X, slice by the order statistics of
// Y, eigendecompose the proportion-weighted covariance of slice means, and
// back-transform the leading q eigenvectors.
CsEstimate sir_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const SirConfig& cfg);

}  // namespace qsdr
