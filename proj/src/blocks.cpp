#include "nbm/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nbm {

BlockPartitionView::BlockPartitionView(const NodeClustering& communities,
                                       const MetaClustering& metas) {
    const int n = communities.size();
    const int k = communities.groups();
    if (metas.size() != k)
        throw ModelError("meta clustering must assign every community");

    // Communities ordered by (meta label, community label).
    community_order_.resize(static_cast<std::size_t>(k));
    std::iota(community_order_.begin(), community_order_.end(), 0);
    std::stable_sort(community_order_.begin(), community_order_.end(),
                     [&](int a, int b) { return metas.label(a) < metas.label(b); });

    const auto group_members = communities.members();
    permutation_.reserve(static_cast<std::size_t>(n));
    community_begin_.assign(static_cast<std::size_t>(k), 0);
    community_end_.assign(static_cast<std::size_t>(k), 0);
    meta_begin_.assign(static_cast<std::size_t>(metas.groups()) + 1, 0);

    for (int slot = 0; slot < k; ++slot) {
        const int community = community_order_[static_cast<std::size_t>(slot)];
        community_begin_[static_cast<std::size_t>(community)] =
            static_cast<int>(permutation_.size());
        for (int node : group_members[static_cast<std::size_t>(community)])
            permutation_.push_back(node);
        community_end_[static_cast<std::size_t>(community)] =
            static_cast<int>(permutation_.size());
        // Slots are grouped by meta, so the last community of each meta
        // leaves the meta's end offset behind.
        meta_begin_[static_cast<std::size_t>(metas.label(community)) + 1] =
            static_cast<int>(permutation_.size());
    }

    inverse_.assign(static_cast<std::size_t>(n), 0);
    for (int pos = 0; pos < n; ++pos)
        inverse_[static_cast<std::size_t>(permutation_[static_cast<std::size_t>(pos)])] = pos;
}

std::pair<int, int> BlockPartitionView::community_range(int community) const {
    return {community_begin_[static_cast<std::size_t>(community)],
            community_end_[static_cast<std::size_t>(community)]};
}

std::pair<int, int> BlockPartitionView::meta_range(int meta) const {
    return {meta_begin_[static_cast<std::size_t>(meta)],
            meta_begin_[static_cast<std::size_t>(meta) + 1]};
}

Eigen::Block<const Eigen::MatrixXd>
BlockPartitionView::block(const Eigen::MatrixXd& sorted, int k1, int k2) const {
    const auto [r0, r1] = community_range(k1);
    const auto [c0, c1] = community_range(k2);
    return sorted.block(r0, c0, r1 - r0, c1 - c0);
}

Eigen::Block<const Eigen::MatrixXd>
BlockPartitionView::meta_block(const Eigen::MatrixXd& sorted, int l1, int l2) const {
    const auto [r0, r1] = meta_range(l1);
    const auto [c0, c1] = meta_range(l2);
    return sorted.block(r0, c0, r1 - r0, c1 - c0);
}

Eigen::Block<const Eigen::MatrixXd>
BlockPartitionView::column_block(const Eigen::MatrixXd& sorted, int meta,
                                 int community) const {
    const auto [r0, r1] = meta_range(meta);
    const auto [c0, c1] = community_range(community);
    return sorted.block(r0, c0, r1 - r0, c1 - c0);
}

Eigen::MatrixXd BlockPartitionView::sort_matrix(const Eigen::MatrixXd& m) const {
    const int n = node_count();
    if (m.rows() != n || m.cols() != n)
        throw ModelError("matrix size does not match the partition");
    Eigen::MatrixXd result(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            result(a, b) = m(permutation_[static_cast<std::size_t>(a)],
                             permutation_[static_cast<std::size_t>(b)]);
    return result;
}

Eigen::MatrixXd BlockPartitionView::unsort_matrix(const Eigen::MatrixXd& sorted) const {
    const int n = node_count();
    if (sorted.rows() != n || sorted.cols() != n)
        throw ModelError("matrix size does not match the partition");
    Eigen::MatrixXd result(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            result(permutation_[static_cast<std::size_t>(a)],
                   permutation_[static_cast<std::size_t>(b)]) = sorted(a, b);
    return result;
}

std::pair<Eigen::MatrixXd, BlockPartitionView>
permute_to_blocks(const Eigen::MatrixXd& m, const NodeClustering& communities,
                  const MetaClustering& metas) {
    if (m.rows() != communities.size() || m.cols() != communities.size())
        throw ModelError("matrix size does not match the clustering");
    BlockPartitionView view(communities, metas);
    return {view.sort_matrix(m), std::move(view)};
}

Eigen::MatrixXd block_average(const Eigen::MatrixXd& p,
                              const NodeClustering& communities) {
    const int n = communities.size();
    if (p.rows() != n || p.cols() != n)
        throw ModelError("matrix size does not match the clustering");
    const int k = communities.groups();
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            sums(communities.label(i), communities.label(j)) += p(i, j);
    const auto sizes = communities.group_sizes();
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            sums(a, b) /= static_cast<double>(sizes[static_cast<std::size_t>(a)]) *
                          static_cast<double>(sizes[static_cast<std::size_t>(b)]);
    return sums;
}

ProbabilityMatrix build_probability(const NbmParameters& params) {
    params.validate();
    const int n = params.communities.size();
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i) {
        const int ki = params.communities.label(i);
        const int li = params.metas.label(ki);
        for (int j = 0; j < n; ++j) {
            const int kj = params.communities.label(j);
            const int lj = params.metas.label(kj);
            double v = params.block_means(ki, kj) * params.profiles(i, lj) *
                       params.profiles(j, li);
            if (v > 1.0) {
                if (v > 1.0 + 1e-9)
                    throw ModelError("parameters produce probability above 1");
                v = 1.0;
            }
            if (v < 0.0) v = 0.0;
            p(i, j) = v;
        }
    }
    // Exact symmetry despite floating-point multiplication order.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) p(j, i) = p(i, j);
    return ProbabilityMatrix(std::move(p));
}

ModelKind model_kind(const NbmParameters& params, double tol) {
    params.validate(std::max(tol, 1e-9));
    const int k = params.communities.groups();
    const int l = params.metas.groups();
    if (l == k) return ModelKind::pabm;
    if (l == 1) {
        const bool flat = ((params.profiles.array() - 1.0).abs() <= tol).all();
        return flat ? ModelKind::sbm : ModelKind::dcbm;
    }
    return ModelKind::nbm;
}

} // namespace nbm
