#include "nbm/oracle.hpp"

#include "nbm/estimator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace nbm {

namespace {

// Advance a base-`radix` counter; false once it wraps around.
bool next_tuple(std::vector<int>& digits, int radix) {
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (++digits[i] < radix) return true;
        digits[i] = 0;
    }
    return false;
}

bool surjective(const std::vector<int>& labels, int groups) {
    std::vector<bool> seen(static_cast<std::size_t>(groups), false);
    for (int label : labels) seen[static_cast<std::size_t>(label)] = true;
    for (bool s : seen)
        if (!s) return false;
    return true;
}

} // namespace

ExhaustiveSearch exhaustive_best_clustering(const Eigen::MatrixXd& p, int k,
                                            int l, double tol) {
    const int n = static_cast<int>(p.rows());
    if (p.cols() != n || n == 0)
        throw ModelError("exhaustive search expects a square non-empty matrix");
    if (n > 12 || k > 3 || k < 1 || l < 1 || l > k)
        throw ModelError("exhaustive search is limited to n <= 12, K <= 3, L <= K");

    // Near-minimizers are collected against the running best and
    // re-filtered once the true minimum is known.
    ExhaustiveSearch search;
    bool first = true;
    std::vector<std::pair<std::vector<int>, std::vector<int>>> near;
    std::vector<double> near_values;
    std::vector<int> z(static_cast<std::size_t>(n), 0);
    do {
        if (!surjective(z, k)) continue;
        const NodeClustering communities(z, k);
        std::vector<int> c(static_cast<std::size_t>(k), 0);
        do {
            if (!surjective(c, l)) continue;
            const double value = objective(p, communities, MetaClustering(c, l));
            if (first || value < search.best) {
                search.best = value;
                first = false;
            }
            if (value <= search.best + tol) {
                near.emplace_back(z, c);
                near_values.push_back(value);
            }
        } while (next_tuple(c, l));
    } while (next_tuple(z, k));

    for (std::size_t i = 0; i < near.size(); ++i)
        if (near_values[i] <= search.best + tol)
            search.minimizers.push_back(std::move(near[i]));
    return search;
}

double elastic_net_objective(const Eigen::MatrixXd& a, int column,
                             const Eigen::VectorXd& w, double gamma1,
                             double gamma2) {
    const Eigen::VectorXd residual = a.col(column) - a * w;
    return 0.5 * residual.squaredNorm() + gamma1 * w.lpNorm<1>() +
           gamma2 * w.squaredNorm();
}

Eigen::VectorXd reference_elastic_net(const Eigen::MatrixXd& a, int column,
                                      double gamma1, double gamma2,
                                      long max_iterations) {
    if (a.rows() != a.cols())
        throw ModelError("reference solve expects a square matrix");
    const int n = static_cast<int>(a.rows());
    if (column < 0 || column >= n) throw ModelError("column index out of range");

    const Eigen::MatrixXd gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lipschitz = eig.eigenvalues().maxCoeff() + 2.0 * gamma2;
    if (lipschitz <= 0.0) return Eigen::VectorXd::Zero(n);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    double value = elastic_net_objective(a, column, w, gamma1, gamma2);
    double step = 2.0 / lipschitz;
    for (long iter = 0; iter < max_iterations; ++iter) {
        // Gradient of the smooth part, prox of the L1 part, projection
        // onto {w_column = 0}.
        const Eigen::VectorXd gradient =
            gram * w - gram.col(column) + 2.0 * gamma2 * w;
        Eigen::VectorXd candidate = w - step * gradient;
        const double threshold = step * gamma1;
        for (int i = 0; i < n; ++i) {
            const double v = candidate(i);
            candidate(i) = v > threshold    ? v - threshold
                           : v < -threshold ? v + threshold
                                            : 0.0;
        }
        candidate(column) = 0.0;

        const double candidate_value =
            elastic_net_objective(a, column, candidate, gamma1, gamma2);
        if (candidate_value > value) {
            step *= 0.5;  // diminish and retry from the same iterate
            continue;
        }
        const bool settled =
            value - candidate_value <= 1e-12 * std::max(1.0, value) &&
            (candidate - w).lpNorm<Eigen::Infinity>() <= 1e-12;
        w = std::move(candidate);
        value = candidate_value;
        if (settled) break;
    }
    return w;
}

} // namespace nbm
