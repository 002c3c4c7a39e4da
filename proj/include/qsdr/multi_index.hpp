#pragma once

#include <Eigen/Core>

#include <vector>

namespace qsdr {

/// Multi-index family A = {u : [u] <= k} over p coordinates, where
/// [u] = sum_i u_i. Ordering is graded: the zero index first, then the p
/// first-order indices in coordinate order, then each higher degree in
/// lexicographically descending order. Identical (p, k) always produce an
/// identical list.
class MultiIndexSet {
public:
    MultiIndexSet(int p, int k);

    int p() const { return p_; }
    int k() const { return k_; }

    // s(A) = binomial(p + k, k)
    int size() const { return static_cast<int>(indices_.size()); }

    const std::vector<int>& operator[](int i) const { return indices_[i]; }
    const std::vector<std::vector<int>>& indices() const { return indices_; }

    // degree [u] of the i-th index
    int degree(int i) const { return degrees_[i]; }

    // Positions of the p first-order indices, in coordinate order.
    // Empty when k = 0.
    const std::vector<int>& first_order_positions() const { return first_order_; }

private:
    int p_;
    int k_;
    std::vector<std::vector<int>> indices_;
    std::vector<int> degrees_;
    std::vector<int> first_order_;
};

// x(h, A): the component for index u is h^{-[u]} * prod_i d_i^{u_i}, with
// 0^0 = 1, so the zero index always maps to 1.
Eigen::VectorXd design_vector(const Eigen::VectorXd& displacement, double h,
                              const MultiIndexSet& A);

// Design matrix with one design_vector row per displacement row.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& displacements, double h,
                              const MultiIndexSet& A);

}  // namespace qsdr
