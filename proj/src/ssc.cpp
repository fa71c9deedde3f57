#include "nbm/ssc.hpp"

#include "nbm/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nbm {

namespace {

double soft_threshold(double z, double threshold) {
    if (z > threshold) return z - threshold;
    if (z < -threshold) return z + threshold;
    return 0.0;
}

// Stationarity violation of coordinate i given the smooth gradient g_i.
double kkt_violation(double w, double g, double gamma1) {
    if (w > 0.0) return std::abs(g + gamma1);
    if (w < 0.0) return std::abs(g - gamma1);
    return std::max(0.0, std::abs(g) - gamma1);
}

// One pass over `indices`: returns the largest pre-update violation seen.
// q tracks G * w incrementally.
double sweep(const Eigen::MatrixXd& gram, const Eigen::VectorXd& target,
             const std::vector<int>& indices, double gamma1, double gamma2,
             Eigen::VectorXd& w, Eigen::VectorXd& q) {
    double worst = 0.0;
    for (int i : indices) {
        const double g_ii = gram(i, i);
        const double grad = q(i) - target(i) + 2.0 * gamma2 * w(i);
        worst = std::max(worst, kkt_violation(w(i), grad, gamma1));
        const double z = target(i) - (q(i) - g_ii * w(i));
        const double denom = g_ii + 2.0 * gamma2;
        const double updated = denom > 0.0 ? soft_threshold(z, gamma1) / denom : 0.0;
        if (updated != w(i)) {
            q += gram.col(i) * (updated - w(i));
            w(i) = updated;
        }
    }
    return worst;
}

// Exact violation with a freshly computed q; also refreshes q in place.
double exact_violation(const Eigen::MatrixXd& gram, const Eigen::VectorXd& target,
                       const std::vector<int>& indices, double gamma1,
                       double gamma2, const Eigen::VectorXd& w,
                       Eigen::VectorXd& q) {
    q.noalias() = gram * w;
    double worst = 0.0;
    for (int i : indices) {
        const double grad = q(i) - target(i) + 2.0 * gamma2 * w(i);
        worst = std::max(worst, kkt_violation(w(i), grad, gamma1));
    }
    return worst;
}

Eigen::VectorXd solve_column_with_gram(const Eigen::MatrixXd& gram, int column,
                                       double gamma1, double gamma2, double tol,
                                       int max_sweeps, ColumnSummary* summary) {
    const int n = static_cast<int>(gram.rows());
    if (max_sweeps <= 0) max_sweeps = 10 * n;

    std::vector<int> all;
    all.reserve(static_cast<std::size_t>(n) - 1);
    for (int i = 0; i < n; ++i)
        if (i != column) all.push_back(i);

    const Eigen::VectorXd target = gram.col(column);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);

    int sweeps = 0;
    double residual = std::numeric_limits<double>::infinity();
    while (sweeps < max_sweeps) {
        sweep(gram, target, all, gamma1, gamma2, w, q);
        ++sweeps;

        // Active-set refinement: iterate the current support only.
        std::vector<int> active;
        for (int i : all)
            if (w(i) != 0.0) active.push_back(i);
        while (!active.empty() && sweeps < max_sweeps) {
            const double v = sweep(gram, target, active, gamma1, gamma2, w, q);
            ++sweeps;
            if (v <= tol) break;
        }

        // Trustworthy stopping test: recompute q and the global residual.
        residual = exact_violation(gram, target, all, gamma1, gamma2, w, q);
        if (residual <= tol) {
            if (summary) {
                summary->sweeps = sweeps;
                summary->kkt_residual = residual;
            }
            return w;
        }
    }
    throw SolverError("elastic-net column " + std::to_string(column) +
                          " did not reach tolerance in " +
                          std::to_string(max_sweeps) + " sweeps",
                      residual);
}

} // namespace

std::pair<double, double> default_gammas(const Eigen::MatrixXd& a) {
    const double cells = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
    if (cells == 0.0) throw ModelError("cannot take the density of an empty matrix");
    const double rho = static_cast<double>((a.array() != 0.0).count()) / cells;
    return {30.0 * rho, 125.0 * (1.0 - rho)};
}

Eigen::VectorXd solve_elastic_net_column(const Eigen::MatrixXd& a, int column,
                                         double gamma1, double gamma2, double tol,
                                         int max_sweeps, ColumnSummary* summary) {
    if (a.rows() != a.cols())
        throw ModelError("self-representation expects a square matrix");
    if (column < 0 || column >= a.rows())
        throw ModelError("column index out of range");
    if (gamma1 < 0.0 || gamma2 < 0.0)
        throw ModelError("penalty weights must be nonnegative");
    const Eigen::MatrixXd gram = a.transpose() * a;
    return solve_column_with_gram(gram, column, gamma1, gamma2, tol, max_sweeps,
                                  summary);
}

SelfRepresentation self_representation(const Eigen::MatrixXd& a,
                                       const SscOptions& opts) {
    if (a.rows() != a.cols())
        throw ModelError("self-representation expects a square matrix");
    const int n = static_cast<int>(a.rows());
    const auto [gamma1, gamma2] = opts.gammas ? *opts.gammas : default_gammas(a);
    if (gamma1 < 0.0 || gamma2 < 0.0)
        throw ModelError("penalty weights must be nonnegative");

    SelfRepresentation result;
    result.gamma1 = gamma1;
    result.gamma2 = gamma2;
    result.weights.resize(n, n);
    result.columns.assign(static_cast<std::size_t>(n), ColumnSummary{});

    const Eigen::MatrixXd gram = a.transpose() * a;
    const int max_sweeps = opts.max_sweep_factor * n;
    parallel_for(n, std::max(1, opts.threads), [&](int j) {
        result.weights.col(j) = solve_column_with_gram(
            gram, j, gamma1, gamma2, opts.tol, max_sweeps,
            &result.columns[static_cast<std::size_t>(j)]);
    });
    return result;
}

Eigen::MatrixXd build_affinity(const Eigen::MatrixXd& weights) {
    if (weights.rows() != weights.cols())
        throw ModelError("affinity expects a square weight matrix");
    Eigen::MatrixXd affinity =
        weights.cwiseAbs() + weights.cwiseAbs().transpose();
    affinity.diagonal().setZero();
    return affinity;
}

namespace {

int count_components(const Eigen::MatrixXd& affinity) {
    const int n = static_cast<int>(affinity.rows());
    std::vector<int> state(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    int components = 0;
    for (int s = 0; s < n; ++s) {
        if (state[static_cast<std::size_t>(s)] != 0) continue;
        ++components;
        stack.push_back(s);
        state[static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (affinity(u, v) > 0.0 && state[static_cast<std::size_t>(v)] == 0) {
                    state[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
    }
    return components;
}

double squared_distance(const Eigen::MatrixXd& points, int i,
                        const Eigen::MatrixXd& centers, int c) {
    return (points.row(i) - centers.row(c)).squaredNorm();
}

// Greedy distance-weighted seeding for k-means.
Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& points, int k,
                             RngStream& rng) {
    const int n = static_cast<int>(points.rows());
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(static_cast<int>(rng.next_below(n)));
    Eigen::VectorXd dist(n);
    for (int i = 0; i < n; ++i) dist(i) = squared_distance(points, i, centers, 0);
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
            dist(i) = std::min(dist(i), squared_distance(points, i, centers, c));
    }
    return centers;
}

struct LloydResult {
    std::vector<int> labels;
    double cost = 0.0;
};

LloydResult lloyd_kmeans(const Eigen::MatrixXd& points, int k, RngStream& rng) {
    const int n = static_cast<int>(points.rows());
    Eigen::MatrixXd centers = seed_centers(points, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), -1);

    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(points, i, centers, 0);
            for (int c = 1; c < k; ++c) {
                const double d = squared_distance(points, i, centers, c);
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

        // Re-seed empty clusters at the worst-fit point of a non-singleton
        // cluster (stealing a singleton would just move the hole).
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int label : labels) ++counts[static_cast<std::size_t>(label)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            int farthest = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                const int owner = labels[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(owner)] < 2) continue;
                const double d = squared_distance(points, i, centers, owner);
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])];
            labels[static_cast<std::size_t>(farthest)] = c;
            ++counts[static_cast<std::size_t>(c)];
            changed = true;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        for (int i = 0; i < n; ++i)
            sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        for (int c = 0; c < k; ++c)
            centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);

        if (!changed) break;
    }

    LloydResult result;
    result.labels = std::move(labels);
    for (int i = 0; i < n; ++i)
        result.cost += squared_distance(points, i, centers,
                                        result.labels[static_cast<std::size_t>(i)]);
    return result;
}

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, RngStream& rng,
                        int restarts) {
    LloydResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        LloydResult run = lloyd_kmeans(points, k, rng);
        if (run.cost < best.cost) best = std::move(run);
    }
    return best.labels;
}

} // namespace

std::vector<int> spectral_ncut(const Eigen::MatrixXd& affinity, int clusters,
                               RngStream& rng) {
    const int n = static_cast<int>(affinity.rows());
    if (affinity.cols() != n || n == 0)
        throw ModelError("affinity must be square and non-empty");
    if (clusters < 1 || clusters > n)
        throw ModelError("cluster count must lie in 1..n");
    if (clusters == 1) return std::vector<int>(static_cast<std::size_t>(n), 0);
    if (((affinity - affinity.transpose()).array().abs() > 1e-9).any())
        throw ModelError("affinity must be symmetric");
    if ((affinity.array() < 0.0).any())
        throw ModelError("affinity must be nonnegative");

    if (count_components(affinity) > n - clusters)
        throw DegenerateAffinityError(
            "affinity graph is too disconnected for the requested clusters");

    // Leading eigenvectors of D^-1/2 S D^-1/2 (zero-degree rows stay zero).
    Eigen::VectorXd scale = affinity.rowwise().sum();
    for (int i = 0; i < n; ++i)
        scale(i) = scale(i) > 0.0 ? 1.0 / std::sqrt(scale(i)) : 0.0;
    const Eigen::MatrixXd normalized =
        scale.asDiagonal() * affinity * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normalized);
    if (eig.info() != Eigen::Success)
        throw NumericError("eigendecomposition of the normalized affinity failed");

    Eigen::MatrixXd embedding = eig.eigenvectors().rightCols(clusters);
    // Deterministic eigenvector orientation: first distinctly nonzero
    // entry is positive.
    for (int c = 0; c < clusters; ++c) {
        for (int i = 0; i < n; ++i) {
            const double v = embedding(i, c);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) embedding.col(c) = -embedding.col(c);
                break;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }

    return kmeans(embedding, clusters, rng, 20);
}

std::vector<int> ssc_cluster(const Eigen::MatrixXd& a, int clusters,
                             const SscOptions& opts) {
    if (a.rows() != a.cols())
        throw ModelError("clustering expects a square matrix");
    Eigen::MatrixXd hollow = a;
    if (!opts.keep_diagonal) hollow.diagonal().setZero();

    SscOptions column_opts = opts;
    if (!column_opts.gammas) column_opts.gammas = default_gammas(hollow);
    const SelfRepresentation rep = self_representation(hollow, column_opts);
    const Eigen::MatrixXd affinity = build_affinity(rep.weights);
    RngStream rng = RngStream::derive(opts.seed, "ncut");
    return spectral_ncut(affinity, clusters, rng);
}

} // namespace nbm
