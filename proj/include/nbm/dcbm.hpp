#pragma once

#include "nbm/rng.hpp"
#include "nbm/types.hpp"

#include <vector>

namespace nbm {

/// Rank-k approximation of a symmetric matrix from its k leading
/// (algebraically largest) eigenpairs, rebuilt as U D U^T.  Ties break
/// toward the smaller eigenvector index.  The expected signal here is
/// positive semidefinite, so leading beats largest-magnitude: the latter
/// can trade a weak signal eigenvalue for a negative noise one.
Eigen::MatrixXd rank_k_approx(const Eigen::MatrixXd& sym, int k);

/// Scale every column to unit L1 norm; all-zero columns pass through.
Eigen::MatrixXd l1_normalize_columns(const Eigen::MatrixXd& m);

/// Lloyd-style k-median under the L1 metric: greedy distance-weighted
/// seeding, assignment to the nearest median, coordinate-wise median
/// updates, empty clusters re-seeded at the worst-fit point.  Rows of
/// `points` are the items; returns the best labeling over `restarts`
/// independent starts.
std::vector<int> k_median(const Eigen::MatrixXd& points, int k, RngStream& rng,
                          int restarts = 10);

/// Community detection for a degree-corrected block structure: rank-k
/// approximation of the adjacency, L1-normalized columns, k-median on
/// those columns.  Every returned community is nonempty.
NodeClustering cluster_communities(const Eigen::MatrixXd& a, int k,
                                   RngStream& rng);

} // namespace nbm
