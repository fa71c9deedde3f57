#pragma once

#include "nbm/blocks.hpp"
#include "nbm/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace nbm {

/// Best rank-one approximation (leading singular triple); zero matrices
/// map to zero.
Eigen::MatrixXd rank_one_project(const Eigen::MatrixXd& m);

/// Goodness of a two-level clustering: sum over every meta-row by
/// community-column block of the squared distance to that block's best
/// rank-one approximation.  Zero exactly when each block is rank one.
double objective(const Eigen::MatrixXd& a, const NodeClustering& communities,
                 const MetaClustering& metas);

/// psi1 * n * K  +  psi2 * K^2 * ln n  +  psi3 * n * ln K.  The formula
/// carries no meta-community term; the parameter is kept so both
/// penalties share one shape.
double penalty_bar(int nodes, int communities, int metas, double psi1 = 1.0,
                   double psi2 = 1.0, double psi3 = 1.0);

/// c1 * (n * L + K^2) * ln n  +  c2 * n * ln K.
double penalty_klopp(int nodes, int communities, int metas, double c1 = 1.0,
                     double c2 = 1.0);

/// Rank-one block estimate for a fixed two-level clustering.
struct ThetaEstimate {
    Eigen::MatrixXd sorted_theta;  // block-sorted order, pre-symmetrization
    Eigen::MatrixXd p_hat;         // original order, symmetrized
    Eigen::MatrixXd block_sigma;   // L x K leading singular value per block
    double objective = 0.0;        // |A_sorted - sorted_theta|_F^2
    BlockPartitionView view;
};

/// Project every meta-row by community-column block of `a` onto rank one,
/// assemble the estimate, undo the sort, and average with the transpose.
ThetaEstimate estimate_theta(const Eigen::MatrixXd& a,
                             const NodeClustering& communities,
                             const MetaClustering& metas);

struct FitOptions {
    /// (gamma1, gamma2) for the subspace step; density rule when absent.
    std::optional<std::pair<double, double>> gammas;
    /// Communities per meta-community; balanced split when absent.
    std::optional<std::vector<int>> allocation;
    std::uint64_t seed = 0;
    int threads = 1;
    double tol = 1e-7;
    int max_sweep_factor = 10;
    double psi1 = 1.0, psi2 = 1.0, psi3 = 1.0;  // reported penalty weights
    /// Keep the input diagonal in the subspace step (matrix-input fits
    /// only; an adjacency diagonal is zero regardless).  Set when fitting
    /// an exact probability matrix, whose diagonal is meaningful.
    bool keep_diagonal = false;
};

struct FitResult {
    NodeClustering communities;   // nodes -> communities
    MetaClustering metas;         // communities -> meta-communities
    int k_hat = 0;
    int l_hat = 0;
    double objective = 0.0;       // residual of the rank-one block fit
    double penalty = 0.0;         // psi-penalty at (n, K)
    Eigen::MatrixXd p_hat;        // symmetrized estimate, original order
    Eigen::MatrixXd block_sigma;  // L x K leading singular values
};

/// Two-step fit with K communities in L meta-communities: subspace
/// clustering splits the nodes into meta-communities (skipped for L == 1),
/// spectral k-median splits each meta-community into its communities
/// (skipped for L == K), then every block is projected onto rank one.
FitResult fit(const SymmetricGraph& graph, int communities, int metas,
              const FitOptions& opts = {});

/// Same pipeline on a raw symmetric matrix; accepts probability matrices
/// or other adjacency-like inputs that SymmetricGraph would reject.
FitResult fit_matrix(const Eigen::MatrixXd& a, int communities, int metas,
                     const FitOptions& opts = {});

/// Fit with meta-community labels already in hand; used by fit and by the
/// model-selection sweep.  `allocation[l]` communities are carved out of
/// meta-community l and labeled consecutively.
FitResult fit_with_meta(const SymmetricGraph& graph,
                        const std::vector<int>& meta_labels, int metas,
                        const std::vector<int>& allocation,
                        const FitOptions& opts = {});

FitResult fit_matrix_with_meta(const Eigen::MatrixXd& a,
                               const std::vector<int>& meta_labels, int metas,
                               const std::vector<int>& allocation,
                               const FitOptions& opts = {});

} // namespace nbm
