#include "qsdr/multi_index.hpp"

#include <cmath>
#include <stdexcept>

namespace qsdr {

namespace {

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// Compositions of `total` into slots [pos, p), lexicographically descending.
void enumerate(std::vector<int>& u, int pos, int total,
               std::vector<std::vector<int>>& out) {
    if (pos + 1 == static_cast<int>(u.size())) {
        u[pos] = total;
        out.push_back(u);
        return;
    }
    for (int v = total; v >= 0; --v) {
        u[pos] = v;
        enumerate(u, pos + 1, total - v, out);
    }
    u[pos] = 0;
}

}  // namespace

MultiIndexSet::MultiIndexSet(int p, int k) : p_(p), k_(k) {
    if (p < 1) throw std::invalid_argument("MultiIndexSet: p must be >= 1");
    if (k < 0) throw std::invalid_argument("MultiIndexSet: k must be >= 0");

    std::vector<int> u(p, 0);
    for (int d = 0; d <= k; ++d) {
        enumerate(u, 0, d, indices_);
    }

    degrees_.reserve(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        int deg = 0;
        for (int v : indices_[i]) deg += v;
        degrees_.push_back(deg);
        if (deg == 1) first_order_.push_back(static_cast<int>(i));
    }

    // first-order positions must come out in coordinate order
    if (k >= 1) {
        std::vector<int> sorted(p, -1);
        for (int pos : first_order_) {
            for (int j = 0; j < p; ++j) {
                if (indices_[pos][j] == 1) sorted[j] = pos;
            }
        }
        first_order_ = sorted;
    }

    if (static_cast<long long>(indices_.size()) != binomial(p + k, k)) {
        throw std::logic_error("MultiIndexSet: cardinality mismatch");
    }
}

Eigen::VectorXd design_vector(const Eigen::VectorXd& displacement, double h,
                              const MultiIndexSet& A) {
    if (!(h > 0.0)) throw std::invalid_argument("design_vector: h must be positive");
    if (displacement.size() != A.p()) {
        throw std::invalid_argument("design_vector: displacement dimension mismatch");
    }
    Eigen::VectorXd z(A.size());
    for (int i = 0; i < A.size(); ++i) {
        const auto& u = A[i];
        double v = std::pow(h, -A.degree(i));
        for (int j = 0; j < A.p(); ++j) {
            for (int rep = 0; rep < u[j]; ++rep) v *= displacement[j];
        }
        z[i] = v;
    }
    return z;
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& displacements, double h,
                              const MultiIndexSet& A) {
    if (!(h > 0.0)) throw std::invalid_argument("design_matrix: h must be positive");
    const Eigen::Index m = displacements.rows();
    Eigen::MatrixXd Z(m, A.size());
    // h^{-[u]} shared across rows
    Eigen::VectorXd scale(A.size());
    for (int i = 0; i < A.size(); ++i) scale[i] = std::pow(h, -A.degree(i));
    for (Eigen::Index r = 0; r < m; ++r) {
        for (int i = 0; i < A.size(); ++i) {
            const auto& u = A[i];
            double v = scale[i];
            for (int j = 0; j < A.p(); ++j) {
                for (int rep = 0; rep < u[j]; ++rep) v *= displacements(r, j);
            }
            Z(r, i) = v;
        }
    }
    return Z;
}

}  // namespace qsdr
