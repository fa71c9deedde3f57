#include "nbm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nbm {

// Jonker-style shortest augmenting path assignment on the negated weights
// (standard O(m^3) Hungarian with row/column potentials).
std::vector<int> max_assignment(const Eigen::MatrixXd& weight) {
    const int m = static_cast<int>(weight.rows());
    if (weight.cols() != m || m == 0)
        throw ModelError("assignment expects a square non-empty matrix");
    const double infinity = std::numeric_limits<double>::infinity();

    // 1-based potentials; cost = -weight turns maximization into the
    // classical minimization form.
    std::vector<double> u(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(m) + 1, 0);  // column -> row
    std::vector<int> path(static_cast<std::size_t>(m) + 1, 0);

    for (int row = 1; row <= m; ++row) {
        match[0] = row;
        int current_col = 0;
        std::vector<double> slack(static_cast<std::size_t>(m) + 1, infinity);
        std::vector<bool> used(static_cast<std::size_t>(m) + 1, false);
        do {
            used[static_cast<std::size_t>(current_col)] = true;
            const int current_row = match[static_cast<std::size_t>(current_col)];
            double delta = infinity;
            int next_col = 0;
            for (int col = 1; col <= m; ++col) {
                if (used[static_cast<std::size_t>(col)]) continue;
                const double reduced = -weight(current_row - 1, col - 1) -
                                       u[static_cast<std::size_t>(current_row)] -
                                       v[static_cast<std::size_t>(col)];
                if (reduced < slack[static_cast<std::size_t>(col)]) {
                    slack[static_cast<std::size_t>(col)] = reduced;
                    path[static_cast<std::size_t>(col)] = current_col;
                }
                if (slack[static_cast<std::size_t>(col)] < delta) {
                    delta = slack[static_cast<std::size_t>(col)];
                    next_col = col;
                }
            }
            for (int col = 0; col <= m; ++col) {
                if (used[static_cast<std::size_t>(col)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(col)])] += delta;
                    v[static_cast<std::size_t>(col)] -= delta;
                } else {
                    slack[static_cast<std::size_t>(col)] -= delta;
                }
            }
            current_col = next_col;
        } while (match[static_cast<std::size_t>(current_col)] != 0);
        // Augment along the alternating path.
        while (current_col != 0) {
            const int previous = path[static_cast<std::size_t>(current_col)];
            match[static_cast<std::size_t>(current_col)] =
                match[static_cast<std::size_t>(previous)];
            current_col = previous;
        }
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(m), -1);
    for (int col = 1; col <= m; ++col)
        row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(col)]) - 1] =
            col - 1;
    return row_to_col;
}

double clustering_error(const std::vector<int>& truth, int truth_groups,
                        const std::vector<int>& estimate, int estimate_groups) {
    const std::size_t n = truth.size();
    if (n == 0) throw ModelError("clustering error needs at least one item");
    if (estimate.size() != n)
        throw ModelError("clusterings must label the same items");
    if (truth_groups < 1 || estimate_groups < 1)
        throw ModelError("group counts must be positive");
    for (int label : truth)
        if (label < 0 || label >= truth_groups)
            throw ModelError("true label " + std::to_string(label) +
                             " outside 0.." + std::to_string(truth_groups - 1));
    for (int label : estimate)
        if (label < 0 || label >= estimate_groups)
            throw ModelError("estimated label " + std::to_string(label) +
                             " outside 0.." + std::to_string(estimate_groups - 1));

    // Confusion counts, zero-padded to a square when the counts differ.
    const int side = std::max(truth_groups, estimate_groups);
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(side, side);
    for (std::size_t i = 0; i < n; ++i)
        confusion(truth[i], estimate[i]) += 1.0;

    const std::vector<int> matching = max_assignment(confusion);
    double agreement = 0.0;
    for (int g = 0; g < side; ++g)
        agreement += confusion(g, matching[static_cast<std::size_t>(g)]);
    return (static_cast<double>(n) - agreement) / static_cast<double>(n);
}

double clustering_error(const NodeClustering& truth,
                        const NodeClustering& estimate) {
    return clustering_error(truth.labels(), truth.groups(), estimate.labels(),
                            estimate.groups());
}

ModelKind fitted_model_kind(int communities, int metas) {
    if (metas == communities) return ModelKind::pabm;
    if (metas == 1) return ModelKind::dcbm;
    return ModelKind::nbm;
}

double parameter_count(ModelKind model, int nodes, int communities, int metas) {
    if (nodes < 1 || communities < 1 || metas < 1)
        throw ModelError("parameter count needs positive dimensions");
    const double n = nodes;
    const double k = communities;
    const double l = metas;
    switch (model) {
        case ModelKind::dcbm:
            return n + k * (k + 1.0) / 2.0 - 1.0;
        case ModelKind::nbm:
            return n * l + k * (k + 1.0) / 2.0 - k * l;
        case ModelKind::pabm:
            return n * k;
        default:
            throw ModelError("no parameter count for model kind " +
                             std::string(to_string(model)));
    }
}

double estimation_error(const Eigen::MatrixXd& p_hat, const Eigen::MatrixXd& p,
                        ModelKind model, int communities, int metas) {
    const Eigen::Index n = p.rows();
    if (p.cols() != n || n == 0)
        throw ModelError("probability matrices must be square and non-empty");
    if (p_hat.rows() != n || p_hat.cols() != n)
        throw ModelError("estimate and truth must have matching shapes");
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double mean_probability = p.sum() / n2;
    const double count =
        parameter_count(model, static_cast<int>(n), communities, metas);
    return ((p_hat - p).squaredNorm() + 2.0 * mean_probability * count) / n2;
}

} // namespace nbm
