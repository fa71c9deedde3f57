#pragma once

#include "nbm/types.hpp"

#include <vector>

namespace nbm {

/// Fraction of items whose labels disagree after the best one-to-one
/// matching of estimated groups to true groups (optimal assignment on the
/// confusion matrix, zero-padded to square when the group counts differ).
double clustering_error(const std::vector<int>& truth, int truth_groups,
                        const std::vector<int>& estimate, int estimate_groups);

double clustering_error(const NodeClustering& truth,
                        const NodeClustering& estimate);

/// Free parameters of each model with n nodes, K communities and L
/// meta-communities.  Only the degree-corrected, nested and
/// popularity-adjusted models have a defined count here.
double parameter_count(ModelKind model, int nodes, int communities, int metas);

/// Model tag implied by a fitted structure: one meta-community is
/// degree-corrected, one community per meta is popularity-adjusted,
/// anything else nested.
ModelKind fitted_model_kind(int communities, int metas);

/// Penalized estimation accuracy:
///   n^-2 * ( |p_hat - p|_F^2 + 2 * mean(p) * parameter_count ).
double estimation_error(const Eigen::MatrixXd& p_hat, const Eigen::MatrixXd& p,
                        ModelKind model, int communities, int metas);

/// Maximum-total-weight assignment of rows to columns of a square cost
/// matrix; returns column index per row.  Exposed for testing.
std::vector<int> max_assignment(const Eigen::MatrixXd& weight);

} // namespace nbm
