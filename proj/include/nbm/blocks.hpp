#pragma once

#include "nbm/types.hpp"

#include <utility>

namespace nbm {

/// Node ordering that makes communities and meta-communities contiguous.
///
/// Nodes are sorted by (meta-community of their community, community
/// label, node index); a matrix permuted with this ordering decomposes
/// into community blocks, meta blocks, and the meta-row x community-col
/// "column blocks" used by the rank-one estimator.
class BlockPartitionView {
public:
    BlockPartitionView(const NodeClustering& communities,
                       const MetaClustering& metas);

    int node_count() const { return static_cast<int>(permutation_.size()); }
    int community_count() const { return static_cast<int>(community_begin_.size()); }
    int meta_count() const { return static_cast<int>(meta_begin_.size()) - 1; }

    /// Sorted position -> original node index.
    const std::vector<int>& permutation() const { return permutation_; }
    /// Original node index -> sorted position.
    const std::vector<int>& inverse_permutation() const { return inverse_; }

    /// Position slot in the sorted community order -> community label.
    int community_at(int slot) const { return community_order_[static_cast<std::size_t>(slot)]; }

    /// Sorted row range [begin, end) of a community (by original label).
    std::pair<int, int> community_range(int community) const;
    /// Sorted row range [begin, end) of a meta-community.
    std::pair<int, int> meta_range(int meta) const;

    /// Community block (k1, k2) of a matrix already in sorted order.
    Eigen::Block<const Eigen::MatrixXd> block(const Eigen::MatrixXd& sorted,
                                              int k1, int k2) const;
    /// Meta block (l1, l2) of a matrix already in sorted order.
    Eigen::Block<const Eigen::MatrixXd> meta_block(const Eigen::MatrixXd& sorted,
                                                   int l1, int l2) const;
    /// Rows of meta-community l by columns of community k.
    Eigen::Block<const Eigen::MatrixXd> column_block(const Eigen::MatrixXd& sorted,
                                                     int meta, int community) const;

    /// M'(a, b) = M(perm(a), perm(b)).
    Eigen::MatrixXd sort_matrix(const Eigen::MatrixXd& m) const;
    /// Inverse of sort_matrix.
    Eigen::MatrixXd unsort_matrix(const Eigen::MatrixXd& sorted) const;

private:
    std::vector<int> permutation_;
    std::vector<int> inverse_;
    std::vector<int> community_order_;   // slot -> community label
    std::vector<int> community_begin_;   // by community label, sorted rows
    std::vector<int> community_end_;     // by community label, sorted rows
    std::vector<int> meta_begin_;        // by meta label, length L+1
};

/// Permute a node-by-node matrix so communities (grouped by meta) become
/// contiguous blocks; returns the permuted matrix and the view describing it.
std::pair<Eigen::MatrixXd, BlockPartitionView>
permute_to_blocks(const Eigen::MatrixXd& m, const NodeClustering& communities,
                  const MetaClustering& metas);

/// K x K matrix of block means: entry (k, l) is the average of p over
/// community k rows and community l columns.
Eigen::MatrixXd block_average(const Eigen::MatrixXd& p,
                              const NodeClustering& communities);

/// Assemble the edge-probability matrix from model parameters:
/// P(i, j) = block_mean(z_i, z_j) * profile(i, meta(z_j)) * profile(j, meta(z_i)).
ProbabilityMatrix build_probability(const NbmParameters& params);

/// Classify parameters in the block-model hierarchy: L == K is
/// popularity-adjusted, L == 1 with flat profiles is stochastic, L == 1
/// otherwise degree-corrected, anything else nested.
ModelKind model_kind(const NbmParameters& params, double tol = 1e-9);

} // namespace nbm
