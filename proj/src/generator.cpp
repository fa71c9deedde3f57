#include "nbm/generator.hpp"

#include "nbm/blocks.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace nbm {

void GeneratorConfig::validate() const {
    if (nodes <= 0 || communities <= 0 || metas <= 0)
        throw ModelError("node, community and meta counts must be positive");
    if (metas > communities)
        throw ModelError("cannot have more meta-communities than communities");
    if (communities > nodes)
        throw ModelError("cannot have more communities than nodes");
    if (nodes % communities != 0)
        throw ModelError("balanced config needs node count divisible by community count");
    if (communities % metas != 0)
        throw ModelError("balanced config needs community count divisible by meta count");
    if ((nodes / communities) % metas != 0)
        throw ModelError("balanced config needs community size divisible by meta count");
    if (!(omega > 0.0 && omega < 1.0))
        throw ModelError("omega must lie in (0, 1)");
    if (!(b_min >= 0.0 && b_min < 1.0))
        throw ModelError("b_min must lie in [0, 1)");
}

NodeClustering canonical_communities(int nodes, int communities) {
    const int per = nodes / communities;
    std::vector<int> labels(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) labels[static_cast<std::size_t>(i)] = i / per;
    return NodeClustering(std::move(labels), communities);
}

MetaClustering canonical_metas(int communities, int metas) {
    const int per = communities / metas;
    std::vector<int> labels(static_cast<std::size_t>(communities));
    for (int k = 0; k < communities; ++k) labels[static_cast<std::size_t>(k)] = k / per;
    return MetaClustering(std::move(labels), metas);
}

Eigen::MatrixXd generate_profiles(const GeneratorConfig& cfg, RngStream& rng) {
    cfg.validate();
    const int n = cfg.nodes;
    const int k = cfg.communities;
    const int l = cfg.metas;
    const int block = n / k;       // nodes per community
    const int sub = block / l;     // nodes per sub-block

    Eigen::MatrixXd profiles(n, l);
    std::vector<double> draw(static_cast<std::size_t>(block));
    for (int g = 0; g < k; ++g) {
        const int base = g * block;
        for (double& v : draw) v = rng.next_unit();
        std::sort(draw.begin(), draw.end());

        // Column 0: ascending within the community.
        for (int i = 0; i < block; ++i) profiles(base + i, 0) = draw[static_cast<std::size_t>(i)];

        // Column 1: descending within the community (each of the L equal
        // sub-blocks reversed, then the sub-blocks themselves rearranged in
        // descending order -- together a full reversal of the block).  A
        // mere per-sub-block reversal would keep the coarse ascending trend
        // of column 0 and leave the two columns nearly parallel.
        if (l >= 2) {
            for (int i = 0; i < block; ++i)
                profiles(base + i, 1) = draw[static_cast<std::size_t>(block - 1 - i)];
        }

        // Columns t >= 2: sub-blocks of column 1 rotated left by t - 1.
        for (int t = 2; t < l; ++t) {
            for (int s = 0; s < l; ++s) {
                const int source = (s + t - 1) % l;
                for (int i = 0; i < sub; ++i)
                    profiles(base + s * sub + i, t) =
                        profiles(base + source * sub + i, 1);
            }
        }

        // Scale every column to sum to the community size.  All columns of
        // a community hold the same values, so one factor serves them all.
        const double sum = std::accumulate(draw.begin(), draw.end(), 0.0);
        profiles.middleRows(base, block) *= static_cast<double>(block) / sum;
    }
    return profiles;
}

namespace {

// Largest profile entry over the rows of one community in one column.
double community_column_max(const Eigen::MatrixXd& profiles, int community,
                            int block, int column) {
    return profiles.block(community * block, column, block, 1).maxCoeff();
}

Eigen::MatrixXd scaled_block_means(const GeneratorConfig& cfg,
                                   const Eigen::MatrixXd& pair_max,
                                   RngStream& rng) {
    const int k = cfg.communities;
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            base(a, b) = base(b, a) = rng.next_range(cfg.b_min, 1.0);
    for (int a = 0; a < k; ++a) {
        double row_max = cfg.b_min;
        for (int b = 0; b < k; ++b)
            if (b != a) row_max = std::max(row_max, base(a, b));
        base(a, a) = rng.next_range(row_max, 1.0);
    }

    Eigen::MatrixXd means(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            means(a, b) = base(a, b) / (pair_max(a, b) * pair_max(a, b));
            if (a != b) means(a, b) *= cfg.omega;
        }
    return means;
}

} // namespace

Eigen::MatrixXd generate_block_means(const GeneratorConfig& cfg,
                                     const Eigen::MatrixXd& profiles,
                                     RngStream& rng) {
    cfg.validate();
    const int k = cfg.communities;
    const int block = cfg.nodes / k;
    if (profiles.rows() != cfg.nodes || profiles.cols() != cfg.metas)
        throw ModelError("profiles shape does not match the config");
    const MetaClustering meta = canonical_metas(k, cfg.metas);

    // pair_max(a, b): largest profile entry over block (a, meta(b)) and
    // its mirror (b, meta(a)); dividing by its square caps probabilities.
    Eigen::MatrixXd pair_max(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const double fwd = community_column_max(profiles, a, block, meta.label(b));
            const double bwd = community_column_max(profiles, b, block, meta.label(a));
            pair_max(a, b) = std::max(fwd, bwd);
        }

    // The base draw almost surely yields a positive-definite result; on
    // the rare failure redraw from the same stream (bounded).
    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::MatrixXd means = scaled_block_means(cfg, pair_max, rng);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(means);
        if (eig.eigenvalues().minCoeff() > 1e-10) return means;
    }
    throw NumericError("could not draw a positive-definite block-mean matrix");
}

SymmetricGraph sample_adjacency(const ProbabilityMatrix& p, RngStream& rng) {
    const int n = p.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double edge = rng.bernoulli(p.values()(i, j)) ? 1.0 : 0.0;
            a(i, j) = edge;
            a(j, i) = edge;
        }
    return SymmetricGraph(std::move(a));
}

GeneratedNetwork generate_network(const GeneratorConfig& cfg) {
    cfg.validate();
    RngStream profile_rng = RngStream::derive(cfg.seed, "profiles");
    RngStream mean_rng = RngStream::derive(cfg.seed, "block-means");
    RngStream shuffle_rng = RngStream::derive(cfg.seed, "shuffle");
    RngStream edge_rng = RngStream::derive(cfg.seed, "edges");

    const Eigen::MatrixXd canonical = generate_profiles(cfg, profile_rng);
    const Eigen::MatrixXd means = generate_block_means(cfg, canonical, mean_rng);

    // Full-rank checks on the drawn parameters: the block means must be
    // positive definite (guaranteed by generate_block_means) and each
    // community's L profile columns linearly independent.
    const int block = cfg.nodes / cfg.communities;
    for (int g = 0; g < cfg.communities; ++g) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(canonical.middleRows(g * block, block));
        if (svd.singularValues().minCoeff() <= 1e-8)
            throw NumericError("degenerate profile draw for community " +
                               std::to_string(g));
    }

    // Shuffle nodes so the released adjacency is not pre-sorted.
    std::vector<int> order(static_cast<std::size_t>(cfg.nodes));
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order.data(), order.size());

    const NodeClustering canon_z = canonical_communities(cfg.nodes, cfg.communities);
    std::vector<int> labels(static_cast<std::size_t>(cfg.nodes));
    Eigen::MatrixXd profiles(cfg.nodes, cfg.metas);
    for (int i = 0; i < cfg.nodes; ++i) {
        const int src = order[static_cast<std::size_t>(i)];
        labels[static_cast<std::size_t>(i)] = canon_z.label(src);
        profiles.row(i) = canonical.row(src);
    }

    NbmParameters params{means, std::move(profiles),
                         NodeClustering(std::move(labels), cfg.communities),
                         canonical_metas(cfg.communities, cfg.metas)};
    ProbabilityMatrix p = build_probability(params);
    SymmetricGraph graph = sample_adjacency(p, edge_rng);
    return GeneratedNetwork{std::move(graph), std::move(p), std::move(params)};
}

} // namespace nbm
