#pragma once

#include "nbm/types.hpp"

#include <utility>
#include <vector>

namespace nbm {

// Slow, independent reference implementations used by the test suite to
// cross-check the production algorithms.  Nothing here is tuned for
// speed; everything is tuned for being obviously correct.

/// Global minimum of the rank-one block objective over every surjective
/// pair of clusterings (nodes -> K communities, communities -> L metas).
struct ExhaustiveSearch {
    double best = 0.0;
    /// All (community labels, meta labels) within `tol` of the minimum.
    std::vector<std::pair<std::vector<int>, std::vector<int>>> minimizers;
};

/// Brute-force enumeration; guarded to n <= 12, K <= 3 because the search
/// space is K^n * L^K.
ExhaustiveSearch exhaustive_best_clustering(const Eigen::MatrixXd& p, int k,
                                            int l, double tol = 1e-9);

/// Elastic-net column objective
///   0.5 * |a_j - A w|^2 + gamma1 * |w|_1 + gamma2 * |w|^2.
double elastic_net_objective(const Eigen::MatrixXd& a, int column,
                             const Eigen::VectorXd& w, double gamma1,
                             double gamma2);

/// Reference solve of the same problem by projected proximal gradient
/// (monotone: the step halves whenever an iteration fails to descend)
/// with an iteration budget of one million.  Independent of the
/// production coordinate-descent path.
Eigen::VectorXd reference_elastic_net(const Eigen::MatrixXd& a, int column,
                                      double gamma1, double gamma2,
                                      long max_iterations = 1000000);

} // namespace nbm
