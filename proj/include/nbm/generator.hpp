#pragma once

#include "nbm/rng.hpp"
#include "nbm/types.hpp"

#include <cstdint>

namespace nbm {

///// Balanced synthetic-model configuration: n nodes split evenly over K
/// communities, communities split evenly over L meta-communities.
struct GeneratorConfig {
    int nodes = 0;
    int communities = 0;
    int metas = 0;
    double omega = 0.5;      // off-diagonal damping of block means, in (0, 1)
    double b_min = 0.35;     // lower bound of the base block-mean draw
    std::uint64_t seed = 0;

    /// Throws ModelError unless n % K == 0, K % L == 0, (n/K) % L == 0,
    /// omega in (0, 1) and 0 <= b_min < 1.
    void validate() const;
};

/// One sampled network together with its ground truth.
struct GeneratedNetwork {
    SymmetricGraph graph;
    ProbabilityMatrix probabilities;
    NbmParameters params;    // truth in the same (shuffled) node order
};

/// Degree-profile matrix (n x L) in canonical node order (community blocks
/// contiguous).  Column 1 sorts each community's uniform draws ascending;
/// column 2 reverses the whole block (descending); columns s >= 3 rotate
/// the L equal sub-blocks of column 2 cyclically by s - 2.  Every
/// community/column pair is scaled to sum to the community size.
Eigen::MatrixXd generate_profiles(const GeneratorConfig& cfg, RngStream& rng);

/// Block-mean matrix (K x K): a symmetric base draw on [b_min, 1] with
/// row-maximal diagonal, divided by the squared largest profile entry of
/// each block pair so probabilities stay within [0, 1], then off-diagonal
/// entries damped by omega.  `profiles` must be in canonical node order.
Eigen::MatrixXd generate_block_means(const GeneratorConfig& cfg,
                                     const Eigen::MatrixXd& profiles,
                                     RngStream& rng);

/// Bernoulli draw of the lower half, mirrored, zero diagonal.
SymmetricGraph sample_adjacency(const ProbabilityMatrix& p, RngStream& rng);

/// Full model draw: profiles, block means, a uniformly random node
/// permutation (the output is NOT pre-sorted), and the adjacency sample.
/// Deterministic in cfg.seed; each sub-step uses its own derived stream.
GeneratedNetwork generate_network(const GeneratorConfig& cfg);

/// Canonical balanced clusterings used by the generator before shuffling:
/// node i -> community i / (n/K), community k -> meta k / (K/L).
NodeClustering canonical_communities(int nodes, int communities);
MetaClustering canonical_metas(int communities, int metas);

} // namespace nbm
