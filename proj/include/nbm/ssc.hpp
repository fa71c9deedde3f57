#pragma once

#include "nbm/rng.hpp"
#include "nbm/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace nbm {

/// Convergence record of one elastic-net column solve.
struct ColumnSummary {
    int sweeps = 0;            // coordinate sweeps used (full or active-set)
    double kkt_residual = 0.0; // stationarity violation at exit
};

/// Self-representation matrix with its solve diagnostics.
struct SelfRepresentation {
    Eigen::MatrixXd weights;   // n x n, column j expresses node j, diagonal 0
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    std::vector<ColumnSummary> columns;
};

struct SscOptions {
    /// (gamma1, gamma2); defaults to the density rule when absent.
    std::optional<std::pair<double, double>> gammas;
    double tol = 1e-7;          // KKT tolerance of the column solves
    int max_sweep_factor = 10;  // sweep budget = factor * n per column
    std::uint64_t seed = 0;     // stream for the spectral k-means
    int threads = 1;
    /// Keep the input diagonal instead of zeroing it.  The default mirrors
    /// the data pipeline, where the diagonal is unobserved (and already
    /// zero for a real adjacency matrix); set this when the input is an
    /// exact probability matrix whose diagonal is meaningful.
    bool keep_diagonal = false;
};

/// Density rule for the elastic-net weights: gamma1 = 30 * rho and
/// gamma2 = 125 * (1 - rho), where rho is the fraction of nonzero
/// entries of the matrix.
std::pair<double, double> default_gammas(const Eigen::MatrixXd& a);

/// Minimize 0.5 * |a_j - A w|^2 + gamma1 * |w|_1 + gamma2 * |w|^2 with
/// w_j pinned to zero, by cyclic coordinate descent over a cached Gram
/// matrix with active-set sweeps.  Throws SolverError when the sweep
/// budget runs out before the KKT residual drops below tol.
Eigen::VectorXd solve_elastic_net_column(const Eigen::MatrixXd& a, int column,
                                         double gamma1, double gamma2,
                                         double tol = 1e-7, int max_sweeps = 0,
                                         ColumnSummary* summary = nullptr);

/// All column solves (parallel over columns; deterministic).
SelfRepresentation self_representation(const Eigen::MatrixXd& a,
                                       const SscOptions& opts = {});

/// Symmetric nonnegative affinity |W| + |W^T| with a zero diagonal.
Eigen::MatrixXd build_affinity(const Eigen::MatrixXd& weights);

/// Normalized-cut spectral clustering: leading eigenvectors of the
/// symmetrically normalized affinity, rows L2-normalized, then k-means
/// (greedy seeding, 20 restarts).  Zero-degree nodes embed at the origin
/// and follow their nearest centroid.  Throws DegenerateAffinityError
/// when the affinity graph splits into more than n - clusters components.
std::vector<int> spectral_ncut(const Eigen::MatrixXd& affinity, int clusters,
                               RngStream& rng);

/// Full pipeline on an adjacency-like matrix: zero the diagonal (unless
/// opts.keep_diagonal), solve the self-representation, build the
/// affinity, cut it into `clusters` groups.  Every returned label is
/// used at least once.
std::vector<int> ssc_cluster(const Eigen::MatrixXd& a, int clusters,
                             const SscOptions& opts = {});

} // namespace nbm
