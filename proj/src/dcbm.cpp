#include "nbm/dcbm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace nbm {

Eigen::MatrixXd rank_k_approx(const Eigen::MatrixXd& sym, int k) {
    const int n = static_cast<int>(sym.rows());
    if (sym.cols() != n || n == 0)
        throw ModelError("rank-k approximation expects a square matrix");
    if (((sym - sym.transpose()).array().abs() > 1e-9).any())
        throw ModelError("rank-k approximation expects a symmetric matrix");
    if (k < 1 || k > n)
        throw ModelError("approximation rank must lie in 1..n");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success)
        throw NumericError("eigendecomposition failed");
    const Eigen::VectorXd& values = eig.eigenvalues();

    // Eigen returns eigenvalues in ascending order; the leading k sit at
    // the tail.  Equal values keep the solver's (index) order.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return values(a) > values(b);
    });

    Eigen::MatrixXd result = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < k; ++r) {
        const int idx = order[static_cast<std::size_t>(r)];
        Eigen::VectorXd vec = eig.eigenvectors().col(idx);
        // Deterministic orientation: first distinctly nonzero entry positive.
        for (int i = 0; i < n; ++i) {
            if (std::abs(vec(i)) > 1e-12) {
                if (vec(i) < 0.0) vec = -vec;
                break;
            }
        }
        result.noalias() += values(idx) * vec * vec.transpose();
    }
    return result;
}

Eigen::MatrixXd l1_normalize_columns(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd result = m;
    for (Eigen::Index j = 0; j < result.cols(); ++j) {
        const double norm = result.col(j).lpNorm<1>();
        if (norm > 0.0) result.col(j) /= norm;
    }
    return result;
}

namespace {

double l1_distance(const Eigen::MatrixXd& points, int i,
                   const Eigen::MatrixXd& centers, int c) {
    return (points.row(i) - centers.row(c)).lpNorm<1>();
}

// Greedy seeding with probability proportional to the L1 distance to the
// nearest already-chosen center (the L1 analog of squared-distance
// seeding).
Eigen::MatrixXd seed_medians(const Eigen::MatrixXd& points, int k,
                             RngStream& rng) {
    const int n = static_cast<int>(points.rows());
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(static_cast<int>(rng.next_below(n)));
    Eigen::VectorXd dist(n);
    for (int i = 0; i < n; ++i) dist(i) = l1_distance(points, i, centers, 0);
    for (int c = 1; c < k; ++c) {
        const double total = dist.sum();
        int pick;
        if (total > 0.0) {
            double u = rng.next_unit() * total;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                u -= dist(i);
                if (u <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.next_below(n));
        }
        centers.row(c) = points.row(pick);
        for (int i = 0; i < n; ++i)
            dist(i) = std::min(dist(i), l1_distance(points, i, centers, c));
    }
    return centers;
}

double assignment_cost(const Eigen::MatrixXd& points,
                       const Eigen::MatrixXd& centers,
                       const std::vector<int>& labels) {
    double cost = 0.0;
    for (int i = 0; i < static_cast<int>(points.rows()); ++i)
        cost += l1_distance(points, i, centers, labels[static_cast<std::size_t>(i)]);
    return cost;
}

// Coordinate-wise median: midpoint of the two central order statistics.
void update_medians(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                    int k, Eigen::MatrixXd& centers) {
    const int d = static_cast<int>(points.cols());
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
    for (int i = 0; i < static_cast<int>(points.rows()); ++i)
        groups[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
    std::vector<double> column;
    for (int c = 0; c < k; ++c) {
        const auto& group = groups[static_cast<std::size_t>(c)];
        for (int j = 0; j < d; ++j) {
            column.clear();
            for (int i : group) column.push_back(points(i, j));
            std::sort(column.begin(), column.end());
            const std::size_t m = column.size();
            centers(c, j) = m % 2 == 1
                                ? column[m / 2]
                                : 0.5 * (column[m / 2 - 1] + column[m / 2]);
        }
    }
}

struct MedianRun {
    std::vector<int> labels;
    double cost = 0.0;
};

MedianRun lloyd_kmedian(const Eigen::MatrixXd& points, int k, RngStream& rng) {
    const int n = static_cast<int>(points.rows());
    Eigen::MatrixXd centers = seed_medians(points, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double previous_cost = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = l1_distance(points, i, centers, 0);
            for (int c = 1; c < k; ++c) {
                const double d = l1_distance(points, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[static_cast<std::size_t>(i)] != best) {
                labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }

        bool repaired = false;
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int label : labels) ++counts[static_cast<std::size_t>(label)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            // Worst-fit point from a non-singleton cluster (stealing a
            // singleton would just move the hole).
            int farthest = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                const int owner = labels[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(owner)] < 2) continue;
                const double d = l1_distance(points, i, centers, owner);
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])];
            labels[static_cast<std::size_t>(farthest)] = c;
            ++counts[static_cast<std::size_t>(c)];
            changed = true;
            repaired = true;
        }

        update_medians(points, labels, k, centers);

        // Both Lloyd steps are exact minimizers, so outside of repair
        // iterations the cost can only go down; a rise beyond rounding
        // noise means a logic bug.
        const double cost = assignment_cost(points, centers, labels);
        if (!repaired &&
            cost > previous_cost + 1e-9 * std::max(1.0, previous_cost))
            throw NumericError("k-median cost increased during Lloyd descent");
        previous_cost = cost;

        if (!changed) break;
    }

    MedianRun run;
    run.labels = std::move(labels);
    run.cost = previous_cost;
    return run;
}

} // namespace

std::vector<int> k_median(const Eigen::MatrixXd& points, int k, RngStream& rng,
                          int restarts) {
    const int n = static_cast<int>(points.rows());
    if (n == 0) throw ModelError("k-median needs at least one point");
    if (k < 1 || k > n)
        throw ModelError("k-median group count must lie in 1..n");
    if (restarts < 1) throw ModelError("k-median needs at least one restart");

    MedianRun best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        MedianRun run = lloyd_kmedian(points, k, rng);
        if (run.cost < best.cost) best = std::move(run);
    }
    return best.labels;
}

NodeClustering cluster_communities(const Eigen::MatrixXd& a, int k,
                                   RngStream& rng) {
    const Eigen::MatrixXd approx = rank_k_approx(a, k);
    const Eigen::MatrixXd normalized = l1_normalize_columns(approx);
    std::vector<int> labels = k_median(normalized.transpose(), k, rng);
    return NodeClustering(std::move(labels), k);
}

} // namespace nbm
