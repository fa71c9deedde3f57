#include "nbm/estimator.hpp"

#include "nbm/dcbm.hpp"
#include "nbm/rng.hpp"
#include "nbm/ssc.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace nbm {

Eigen::MatrixXd rank_one_project(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw ModelError("cannot project an empty matrix");
    if (m.isZero(0.0)) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.singularValues()(0) * svd.matrixU().col(0) *
           svd.matrixV().col(0).transpose();
}

namespace {

// Residual of one block against its best rank-one approximation:
// |B|_F^2 - sigma_1^2, via the leading eigenvalue of the smaller Gram.
double rank_one_residual(const Eigen::Ref<const Eigen::MatrixXd>& block,
                         double* leading_sigma) {
    const double total = block.squaredNorm();
    if (total == 0.0) {
        if (leading_sigma) *leading_sigma = 0.0;
        return 0.0;
    }
    Eigen::MatrixXd gram;
    if (block.rows() <= block.cols())
        gram.noalias() = block * block.transpose();
    else
        gram.noalias() = block.transpose() * block;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw NumericError("block Gram eigendecomposition failed");
    const double top = std::max(0.0, eig.eigenvalues().maxCoeff());
    if (leading_sigma) *leading_sigma = std::sqrt(top);
    return std::max(0.0, total - top);
}

} // namespace

double objective(const Eigen::MatrixXd& a, const NodeClustering& communities,
                 const MetaClustering& metas) {
    const auto [sorted, view] = permute_to_blocks(a, communities, metas);
    double total = 0.0;
    for (int l = 0; l < view.meta_count(); ++l)
        for (int k = 0; k < view.community_count(); ++k)
            total += rank_one_residual(view.column_block(sorted, l, k), nullptr);
    return total;
}

double penalty_bar(int nodes, int communities, int metas, double psi1,
                   double psi2, double psi3) {
    if (nodes < 1 || communities < 1 || metas < 1)
        throw ModelError("penalty arguments must be positive");
    const double n = nodes;
    const double k = communities;
    return psi1 * n * k + psi2 * k * k * std::log(n) + psi3 * n * std::log(k);
}

double penalty_klopp(int nodes, int communities, int metas, double c1,
                     double c2) {
    if (nodes < 1 || communities < 1 || metas < 1)
        throw ModelError("penalty arguments must be positive");
    const double n = nodes;
    const double k = communities;
    const double l = metas;
    return c1 * (n * l + k * k) * std::log(n) + c2 * n * std::log(k);
}

ThetaEstimate estimate_theta(const Eigen::MatrixXd& a,
                             const NodeClustering& communities,
                             const MetaClustering& metas) {
    auto [sorted, view] = permute_to_blocks(a, communities, metas);
    const int n = view.node_count();

    ThetaEstimate estimate{Eigen::MatrixXd::Zero(n, n), {},
                           Eigen::MatrixXd::Zero(view.meta_count(),
                                                 view.community_count()),
                           0.0, view};
    for (int l = 0; l < view.meta_count(); ++l) {
        const auto [r0, r1] = view.meta_range(l);
        for (int k = 0; k < view.community_count(); ++k) {
            const auto [c0, c1] = view.community_range(k);
            const Eigen::MatrixXd projected =
                rank_one_project(sorted.block(r0, c0, r1 - r0, c1 - c0));
            estimate.sorted_theta.block(r0, c0, r1 - r0, c1 - c0) = projected;
            // A rank-one matrix's Frobenius norm is its singular value.
            estimate.block_sigma(l, k) = projected.norm();
        }
    }
    estimate.objective = (sorted - estimate.sorted_theta).squaredNorm();

    const Eigen::MatrixXd unsorted = view.unsort_matrix(estimate.sorted_theta);
    estimate.p_hat = 0.5 * (unsorted + unsorted.transpose());
    return estimate;
}

namespace {

std::vector<int> balanced_allocation(int communities, int metas) {
    if (communities % metas != 0)
        throw ModelError(
            "community count not divisible by meta count; pass an explicit "
            "allocation");
    return std::vector<int>(static_cast<std::size_t>(metas),
                            communities / metas);
}

} // namespace

FitResult fit_matrix_with_meta(const Eigen::MatrixXd& a,
                               const std::vector<int>& meta_labels, int metas,
                               const std::vector<int>& allocation,
                               const FitOptions& opts) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw ModelError("fit expects a square non-empty matrix");
    const int n = static_cast<int>(a.rows());
    if (static_cast<int>(meta_labels.size()) != n)
        throw ModelError("meta labels must cover every node");
    if (static_cast<int>(allocation.size()) != metas)
        throw ModelError("allocation must give a community count per meta");
    const int communities =
        std::accumulate(allocation.begin(), allocation.end(), 0);
    for (int share : allocation)
        if (share < 1) throw ModelError("allocation entries must be positive");

    const MetaClustering node_metas(meta_labels, metas);  // validates labels
    const auto members = node_metas.members();
    for (int l = 0; l < metas; ++l) {
        if (allocation[static_cast<std::size_t>(l)] >
            static_cast<int>(members[static_cast<std::size_t>(l)].size()))
            throw ModelError("meta-community " + std::to_string(l) +
                             " is smaller than its community allocation");
    }

    // Carve each meta-community into its share of communities; community
    // labels are handed out consecutively per meta.
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    std::vector<int> community_meta(static_cast<std::size_t>(communities), 0);
    int offset = 0;
    for (int l = 0; l < metas; ++l) {
        const auto& nodes = members[static_cast<std::size_t>(l)];
        const int share = allocation[static_cast<std::size_t>(l)];
        std::vector<int> local;
        if (share == 1) {
            local.assign(nodes.size(), 0);
        } else {
            Eigen::MatrixXd sub(nodes.size(), nodes.size());
            for (std::size_t r = 0; r < nodes.size(); ++r)
                for (std::size_t c = 0; c < nodes.size(); ++c)
                    sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        a(nodes[r], nodes[c]);
            RngStream rng = RngStream::derive(opts.seed, "communities",
                                              static_cast<std::uint64_t>(l));
            local = cluster_communities(sub, share, rng).labels();
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
            labels[static_cast<std::size_t>(nodes[i])] = offset + local[i];
        for (int s = 0; s < share; ++s)
            community_meta[static_cast<std::size_t>(offset + s)] = l;
        offset += share;
    }

    NodeClustering z(std::move(labels), communities);
    MetaClustering c(std::move(community_meta), metas);
    ThetaEstimate theta = estimate_theta(a, z, c);

    FitResult result{std::move(z),
                     std::move(c),
                     communities,
                     metas,
                     theta.objective,
                     penalty_bar(n, communities, metas, opts.psi1, opts.psi2,
                                 opts.psi3),
                     std::move(theta.p_hat),
                     std::move(theta.block_sigma)};
    return result;
}

FitResult fit_with_meta(const SymmetricGraph& graph,
                        const std::vector<int>& meta_labels, int metas,
                        const std::vector<int>& allocation,
                        const FitOptions& opts) {
    return fit_matrix_with_meta(graph.adjacency(), meta_labels, metas,
                                allocation, opts);
}

FitResult fit_matrix(const Eigen::MatrixXd& a, int communities, int metas,
                     const FitOptions& opts) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw ModelError("fit expects a square non-empty matrix");
    const int n = static_cast<int>(a.rows());
    if (communities < 1 || metas < 1)
        throw ModelError("community and meta counts must be positive");
    if (metas > communities)
        throw ModelError("cannot have more meta-communities than communities");
    if (communities > n)
        throw ModelError("cannot have more communities than nodes");

    std::vector<int> allocation =
        opts.allocation ? *opts.allocation
                        : balanced_allocation(communities, metas);
    if (opts.allocation) {
        if (static_cast<int>(allocation.size()) != metas)
            throw ModelError("allocation must have one entry per meta");
        if (std::accumulate(allocation.begin(), allocation.end(), 0) !=
            communities)
            throw ModelError("allocation must sum to the community count");
    }

    std::vector<int> meta_labels;
    if (metas == 1) {
        // Single meta-community: the subspace step is vacuous.
        meta_labels.assign(static_cast<std::size_t>(n), 0);
    } else {
        SscOptions ssc_opts;
        ssc_opts.gammas = opts.gammas;
        ssc_opts.tol = opts.tol;
        ssc_opts.max_sweep_factor = opts.max_sweep_factor;
        ssc_opts.seed = opts.seed;
        ssc_opts.threads = opts.threads;
        ssc_opts.keep_diagonal = opts.keep_diagonal;
        meta_labels = ssc_cluster(a, metas, ssc_opts);
    }
    // With one community per meta the k-median step is vacuous as well;
    // fit_matrix_with_meta already short-circuits allocation shares of one.
    return fit_matrix_with_meta(a, meta_labels, metas, allocation, opts);
}

FitResult fit(const SymmetricGraph& graph, int communities, int metas,
              const FitOptions& opts) {
    return fit_matrix(graph.adjacency(), communities, metas, opts);
}

} // namespace nbm
