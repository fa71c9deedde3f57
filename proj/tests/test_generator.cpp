#include "nbm/blocks.hpp"
#include "nbm/generator.hpp"
#include "nbm/rng.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>

using nbm::GeneratorConfig;
using nbm::ModelError;
using nbm::RngStream;

namespace {

GeneratorConfig config(int nodes, int communities, int metas, double omega,
                       std::uint64_t seed) {
    GeneratorConfig cfg;
    cfg.nodes = nodes;
    cfg.communities = communities;
    cfg.metas = metas;
    cfg.omega = omega;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("config validation enforces balance and ranges") {
    CHECK_NOTHROW(config(40, 4, 2, 0.6, 0).validate());
    CHECK_THROWS_AS(config(10, 3, 1, 0.6, 0).validate(), ModelError);  // 3 | 10 fails
    CHECK_THROWS_AS(config(12, 4, 3, 0.6, 0).validate(), ModelError);  // 3 | 4 fails
    CHECK_THROWS_AS(config(12, 4, 2, 0.6, 0).validate(), ModelError);  // 2 | 3 fails
    CHECK_THROWS_AS(config(40, 4, 2, 1.0, 0).validate(), ModelError);  // omega
    CHECK_THROWS_AS(config(40, 4, 2, 0.0, 0).validate(), ModelError);
    GeneratorConfig bad = config(40, 4, 2, 0.6, 0);
    bad.b_min = 1.0;
    CHECK_THROWS_AS(bad.validate(), ModelError);
}

TEST_CASE("profiles scale every community and column to the community size") {
    const GeneratorConfig cfg = config(40, 4, 2, 0.6, 7);
    RngStream rng(123);
    const Eigen::MatrixXd profiles = nbm::generate_profiles(cfg, rng);
    REQUIRE(profiles.rows() == 40);
    REQUIRE(profiles.cols() == 2);
    CHECK((profiles.array() > 0.0).all());
    for (int g = 0; g < 4; ++g)
        for (int col = 0; col < 2; ++col)
            CHECK(profiles.block(g * 10, col, 10, 1).sum() ==
                  doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("profile column one ascends within each community") {
    const GeneratorConfig cfg = config(30, 3, 1, 0.6, 11);
    RngStream rng(5);
    const Eigen::MatrixXd profiles = nbm::generate_profiles(cfg, rng);
    REQUIRE(profiles.cols() == 1);
    for (int g = 0; g < 3; ++g)
        for (int i = 1; i < 10; ++i)
            CHECK(profiles(g * 10 + i, 0) >= profiles(g * 10 + i - 1, 0));
}

TEST_CASE("profile column two descends: column one reversed whole-block") {
    const GeneratorConfig cfg = config(24, 2, 2, 0.6, 3);
    RngStream rng(17);
    const Eigen::MatrixXd profiles = nbm::generate_profiles(cfg, rng);
    // Community blocks of 12; full reversal, not merely per-sub-block.
    for (int g = 0; g < 2; ++g)
        for (int i = 0; i < 12; ++i)
            CHECK(profiles(g * 12 + i, 1) == profiles(g * 12 + (11 - i), 0));
}

TEST_CASE("later profile columns rotate the sub-block order of column two") {
    const GeneratorConfig cfg = config(36, 3, 3, 0.6, 9);
    RngStream rng(2);
    const Eigen::MatrixXd profiles = nbm::generate_profiles(cfg, rng);
    // Community blocks of 12, sub-blocks of 4; column 2 shifts column 1's
    // sub-blocks left by one.
    for (int g = 0; g < 3; ++g)
        for (int s = 0; s < 3; ++s)
            for (int i = 0; i < 4; ++i)
                CHECK(profiles(g * 12 + s * 4 + i, 2) ==
                      profiles(g * 12 + ((s + 1) % 3) * 4 + i, 1));
}

TEST_CASE("per-community profile columns are linearly independent") {
    const GeneratorConfig cfg = config(40, 4, 2, 0.6, 21);
    RngStream rng(8);
    const Eigen::MatrixXd profiles = nbm::generate_profiles(cfg, rng);
    for (int g = 0; g < 4; ++g) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(profiles.middleRows(g * 10, 10));
        CHECK(svd.singularValues().minCoeff() > 1e-8);
    }
}

TEST_CASE("block means are symmetric and keep probabilities within one") {
    const GeneratorConfig cfg = config(40, 4, 2, 0.6, 31);
    RngStream profile_rng(41);
    RngStream mean_rng(43);
    const Eigen::MatrixXd profiles = nbm::generate_profiles(cfg, profile_rng);
    const Eigen::MatrixXd means =
        nbm::generate_block_means(cfg, profiles, mean_rng);
    REQUIRE(means.rows() == 4);
    CHECK((means - means.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((means.array() > 0.0).all());

    const nbm::NbmParameters params{
        means, profiles, nbm::canonical_communities(40, 4),
        nbm::canonical_metas(4, 2)};
    const nbm::ProbabilityMatrix p = nbm::build_probability(params);
    CHECK(p.values().maxCoeff() <= 1.0);
    // Some block pair should come close to the cap: the base draw is
    // scaled by exactly the squared largest profile entry of the pair.
    CHECK(p.values().maxCoeff() > 0.3);
}

TEST_CASE("small omega damps cross-community blocks") {
    GeneratorConfig cfg = config(40, 2, 1, 0.05, 13);
    const nbm::GeneratedNetwork network = nbm::generate_network(cfg);
    const Eigen::MatrixXd b = network.params.block_means;
    CHECK(b(0, 1) < 0.2 * std::min(b(0, 0), b(1, 1)));
}

TEST_CASE("adjacency sampling respects degenerate probabilities") {
    RngStream rng(3);
    const nbm::ProbabilityMatrix empty(Eigen::MatrixXd::Zero(6, 6));
    CHECK(nbm::sample_adjacency(empty, rng).adjacency().sum() == 0.0);

    const nbm::ProbabilityMatrix full(Eigen::MatrixXd::Ones(6, 6));
    const nbm::SymmetricGraph complete = nbm::sample_adjacency(full, rng);
    CHECK(complete.adjacency().sum() == doctest::Approx(6.0 * 5.0));
    CHECK(complete.adjacency().diagonal().sum() == 0.0);
}

TEST_CASE("adjacency sampling tracks the probability level") {
    RngStream rng(19);
    const int n = 60;
    const double p = 0.3;
    const nbm::ProbabilityMatrix constant(Eigen::MatrixXd::Constant(n, n, p));
    const nbm::SymmetricGraph graph = nbm::sample_adjacency(constant, rng);
    const double pairs = n * (n - 1) / 2.0;
    const double edges = graph.adjacency().sum() / 2.0;
    const double sigma = std::sqrt(pairs * p * (1.0 - p));
    CHECK(std::abs(edges - pairs * p) < 4.0 * sigma);
}

TEST_CASE("generate_network is deterministic in the seed") {
    const GeneratorConfig cfg = config(40, 4, 2, 0.6, 77);
    const nbm::GeneratedNetwork first = nbm::generate_network(cfg);
    const nbm::GeneratedNetwork second = nbm::generate_network(cfg);
    CHECK(first.graph.adjacency() == second.graph.adjacency());
    CHECK(first.probabilities.values() == second.probabilities.values());
    CHECK(first.params.communities.labels() == second.params.communities.labels());
    CHECK(first.params.profiles == second.params.profiles);

    GeneratorConfig other = cfg;
    other.seed = 78;
    const nbm::GeneratedNetwork third = nbm::generate_network(other);
    CHECK(first.graph.adjacency() != third.graph.adjacency());
}

TEST_CASE("generated truth satisfies the model invariants") {
    const GeneratorConfig cfg = config(90, 6, 3, 0.7, 5);
    const nbm::GeneratedNetwork network = nbm::generate_network(cfg);
    CHECK_NOTHROW(network.params.validate());
    CHECK(network.params.communities.group_sizes() ==
          std::vector<int>{15, 15, 15, 15, 15, 15});

    // The averaged probability over each block recovers the block mean
    // (profile factors average to one by the scaling convention).
    const Eigen::MatrixXd recovered = nbm::block_average(
        network.probabilities.values(), network.params.communities);
    CHECK((recovered - network.params.block_means).cwiseAbs().maxCoeff() < 1e-9);

    // The sample only has edges where the probability is positive.
    const auto& a = network.graph.adjacency();
    const auto& p = network.probabilities.values();
    for (int i = 0; i < 90; ++i)
        for (int j = 0; j < 90; ++j)
            if (a(i, j) == 1.0) CHECK(p(i, j) > 0.0);
}

TEST_CASE("the released node order is shuffled but relabels cleanly") {
    const GeneratorConfig cfg = config(40, 4, 2, 0.6, 99);
    const nbm::GeneratedNetwork network = nbm::generate_network(cfg);
    // Sorting by the truth recovers contiguous rank-one blocks of P.
    const auto [sorted, view] =
        nbm::permute_to_blocks(network.probabilities.values(),
                               network.params.communities, network.params.metas);
    for (int k1 = 0; k1 < 4; ++k1)
        for (int k2 = 0; k2 < 4; ++k2) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(view.block(sorted, k1, k2));
            CHECK(svd.singularValues()(1) < 1e-9);
        }
}
