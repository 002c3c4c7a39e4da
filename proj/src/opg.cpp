#include "qsdr/opg.hpp"

#include <stdexcept>

#include "qsdr/eigen_sym.hpp"
#include "qsdr/errors.hpp"

namespace qsdr {

double level_weight(const Eigen::VectorXd& eigenvalues_desc, int q, double threshold) {
    const Eigen::Index p = eigenvalues_desc.size();
    if (q < 1 || q > p) throw std::invalid_argument("level_weight: q out of range");
    if (eigenvalues_desc[0] < threshold) return 0.0;
    double top = 0.0, total = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
        double lam = std::max(eigenvalues_desc[k], 0.0);
        total += lam;
        if (k < q) top += lam;
    }
    if (!(total > 0.0)) return 0.0;  // zero matrix carries no weight
    return top / total;
}

LevelOpg level_opg(const GradientField& field, int q, double weight_threshold) {
    const Eigen::Index n = field.gradients.rows();
    const Eigen::Index p = field.gradients.cols();
    if (field.valid_mask.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("level_opg: mask length mismatch");
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
    int n_valid = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!field.valid_mask[j]) continue;
        M.selfadjointView<Eigen::Lower>().rankUpdate(field.gradients.row(j).transpose());
        ++n_valid;
    }
    if (n_valid == 0) {
        throw NoValidGradients("no valid gradient at tau = " + std::to_string(field.tau));
    }
    M = M.selfadjointView<Eigen::Lower>();
    M /= static_cast<double>(n_valid);

    LevelOpg level;
    level.tau = field.tau;
    level.matrix = M;
    level.eigenvalues = symmetric_eigen(M).eigenvalues;
    level.weight = level_weight(level.eigenvalues, q, weight_threshold);
    return level;
}

CompositeOpg composite_opg(const std::vector<LevelOpg>& levels, bool use_adaptive_weights,
                           double delta_star) {
    if (levels.empty()) throw std::invalid_argument("composite_opg: empty level list");
    const Eigen::Index p = levels.front().matrix.rows();

    CompositeOpg out;
    out.delta_star = delta_star;
    out.matrix = Eigen::MatrixXd::Zero(p, p);
    out.tau_grid.reserve(levels.size());
    out.weights_used.reserve(levels.size());

    if (use_adaptive_weights) {
        // grid sum of w(tau) Sigma(tau); the span is scale-free so no
        // normalization by the weight total
        double weight_total = 0.0;
        for (const auto& level : levels) {
            out.tau_grid.push_back(level.tau);
            out.weights_used.push_back(level.weight);
            weight_total += level.weight;
            out.matrix += level.weight * level.matrix;
        }
        if (!(weight_total > 0.0)) throw AllWeightsZero();
    } else {
        for (const auto& level : levels) {
            out.tau_grid.push_back(level.tau);
            out.weights_used.push_back(1.0);
            out.matrix += level.matrix;
        }
        out.matrix /= static_cast<double>(levels.size());
    }

    SymmetricEigen eig = symmetric_eigen(out.matrix);
    out.eigenvalues = eig.eigenvalues;
    out.eigenvectors = eig.eigenvectors;
    return out;
}

}  // namespace qsdr
