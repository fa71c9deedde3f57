#include "nbm/dcbm.hpp"
#include "nbm/generator.hpp"
#include "nbm/metrics.hpp"
#include "nbm/rng.hpp"
#include "nbm/types.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using nbm::ModelError;
using nbm::NodeClustering;
using nbm::RngStream;

namespace {

Eigen::MatrixXd random_symmetric(RngStream& rng, int n) {
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) {
            const double v = rng.next_unit() - 0.5;
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

// Orthogonal basis from the QR factors of a random square matrix.
Eigen::MatrixXd random_orthogonal(RngStream& rng, int n) {
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = rng.next_unit() - 0.5;
    return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
}

// Symmetric matrix with a prescribed spectrum, plus the basis used.
Eigen::MatrixXd with_spectrum(const Eigen::MatrixXd& q,
                              const Eigen::VectorXd& eigenvalues) {
    return q * eigenvalues.asDiagonal() * q.transpose();
}

// L1 distance of every point (row) to its cluster's coordinate-wise median,
// with medians recomputed from scratch for the given labeling.
double kmedian_cost(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                    int k) {
    const int d = static_cast<int>(points.cols());
    double cost = 0.0;
    for (int g = 0; g < k; ++g) {
        std::vector<int> members;
        for (int i = 0; i < points.rows(); ++i)
            if (labels[static_cast<std::size_t>(i)] == g) members.push_back(i);
        if (members.empty()) continue;
        Eigen::VectorXd median(d);
        std::vector<double> column(members.size());
        for (int j = 0; j < d; ++j) {
            for (std::size_t m = 0; m < members.size(); ++m)
                column[m] = points(members[m], j);
            std::sort(column.begin(), column.end());
            const std::size_t half = column.size() / 2;
            median(j) = column.size() % 2 == 1
                            ? column[half]
                            : 0.5 * (column[half - 1] + column[half]);
        }
        for (int i : members)
            cost += (points.row(i).transpose() - median).cwiseAbs().sum();
    }
    return cost;
}

// Minimum k-median cost over every assignment of `n` points to two
// nonempty clusters (labelings enumerated by bitmask).
double brute_force_two_median(const Eigen::MatrixXd& points) {
    const int n = static_cast<int>(points.rows());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
        best = std::min(best, kmedian_cost(points, labels, 2));
    }
    return best;
}

} // namespace

TEST_CASE("rank_k_approx validates input") {
    RngStream rng(1);
    const Eigen::MatrixXd sym = random_symmetric(rng, 5);
    CHECK_THROWS_AS(nbm::rank_k_approx(sym, 0), ModelError);
    CHECK_THROWS_AS(nbm::rank_k_approx(sym, 6), ModelError);
    CHECK_THROWS_AS(nbm::rank_k_approx(Eigen::MatrixXd::Zero(3, 4), 1), ModelError);
    Eigen::MatrixXd lopsided = sym;
    lopsided(0, 4) += 1e-3;
    CHECK_THROWS_AS(nbm::rank_k_approx(lopsided, 2), ModelError);
}

TEST_CASE("rank_k_approx reproduces the matrix at full rank") {
    RngStream rng(2);
    const Eigen::MatrixXd sym = random_symmetric(rng, 7);
    CHECK((nbm::rank_k_approx(sym, 7) - sym).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rank_k_approx keeps the algebraically largest eigenpairs") {
    RngStream rng(3);
    const Eigen::MatrixXd q = random_orthogonal(rng, 4);
    Eigen::VectorXd spectrum(4);
    // -3 has the second-largest magnitude; a magnitude rule would keep it.
    spectrum << 5.0, 1.0, 0.5, -3.0;
    const Eigen::MatrixXd sym = with_spectrum(q, spectrum);

    Eigen::VectorXd kept = spectrum;
    kept.tail(2).setZero(); // keep 5 and 1
    const Eigen::MatrixXd expected = with_spectrum(q, kept);
    CHECK((nbm::rank_k_approx(sym, 2) - expected).cwiseAbs().maxCoeff() < 1e-9);

    // Rank 1 keeps only the top eigenpair even when negative mass dominates.
    kept.setZero();
    kept(0) = 5.0;
    CHECK((nbm::rank_k_approx(sym, 1) - with_spectrum(q, kept)).cwiseAbs().maxCoeff()
          < 1e-9);
}

TEST_CASE("rank_k_approx is exact on a low-rank psd matrix") {
    RngStream rng(4);
    Eigen::MatrixXd factors(8, 3);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 8; ++i) factors(i, j) = rng.next_unit() - 0.5;
    const Eigen::MatrixXd sym = factors * factors.transpose();
    CHECK((nbm::rank_k_approx(sym, 3) - sym).cwiseAbs().maxCoeff() < 1e-9);
    // The approximation is idempotent in rank.
    const Eigen::MatrixXd once = nbm::rank_k_approx(sym, 2);
    CHECK((nbm::rank_k_approx(once, 2) - once).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rank_k_approx residual matches the dropped psd eigenvalues") {
    RngStream rng(5);
    const Eigen::MatrixXd q = random_orthogonal(rng, 6);
    Eigen::VectorXd spectrum(6);
    spectrum << 9.0, 4.0, 2.5, 1.0, 0.4, 0.1;
    const Eigen::MatrixXd sym = with_spectrum(q, spectrum);
    const double residual = (sym - nbm::rank_k_approx(sym, 2)).squaredNorm();
    const double dropped = spectrum.tail(4).squaredNorm();
    CHECK(residual == doctest::Approx(dropped).epsilon(1e-9));
}

TEST_CASE("l1_normalize_columns scales columns and keeps zero columns") {
    Eigen::MatrixXd m(3, 3);
    m << 1.0, 0.0, -2.0,
         3.0, 0.0,  0.0,
         0.0, 0.0,  2.0;
    const Eigen::MatrixXd out = nbm::l1_normalize_columns(m);
    CHECK(out(0, 0) == doctest::Approx(0.25));
    CHECK(out(1, 0) == doctest::Approx(0.75));
    CHECK(out.col(1).isZero(0.0));
    CHECK(out(0, 2) == doctest::Approx(-0.5));
    CHECK(out(2, 2) == doctest::Approx(0.5));
    for (int j = 0; j < 3; j += 2)
        CHECK(out.col(j).cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("k_median validates input") {
    RngStream rng(6);
    Eigen::MatrixXd points = Eigen::MatrixXd::Random(4, 2);
    CHECK_THROWS_AS(nbm::k_median(Eigen::MatrixXd(0, 2), 1, rng), ModelError);
    CHECK_THROWS_AS(nbm::k_median(points, 0, rng), ModelError);
    CHECK_THROWS_AS(nbm::k_median(points, 5, rng), ModelError);
    CHECK_THROWS_AS(nbm::k_median(points, 2, rng, 0), ModelError);
}

TEST_CASE("k_median separates well-spread blobs exactly") {
    RngStream rng(7);
    const int per = 12;
    Eigen::MatrixXd points(3 * per, 2);
    const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
    std::vector<int> truth(static_cast<std::size_t>(3 * per));
    for (int g = 0; g < 3; ++g)
        for (int i = 0; i < per; ++i) {
            const int row = g * per + i;
            points(row, 0) = centers[g][0] + rng.next_unit() - 0.5;
            points(row, 1) = centers[g][1] + rng.next_unit() - 0.5;
            truth[static_cast<std::size_t>(row)] = g;
        }
    RngStream fit_rng(8);
    const std::vector<int> labels = nbm::k_median(points, 3, fit_rng);
    const NodeClustering a(labels, 3);
    const NodeClustering b(truth, 3);
    CHECK(nbm::clustering_error(a, b) == doctest::Approx(0.0));
}

TEST_CASE("k_median matches the brute-force optimum on small inputs") {
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        RngStream rng(seed);
        Eigen::MatrixXd points(7, 2);
        for (int i = 0; i < points.rows(); ++i) {
            points(i, 0) = 3.0 * rng.next_unit();
            points(i, 1) = 3.0 * rng.next_unit();
        }
        RngStream fit_rng(seed + 100);
        const std::vector<int> labels = nbm::k_median(points, 2, fit_rng, 40);
        const double achieved = kmedian_cost(points, labels, 2);
        const double best = brute_force_two_median(points);
        CHECK(achieved == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("k_median with one cluster per point has zero cost") {
    RngStream rng(9);
    Eigen::MatrixXd points = Eigen::MatrixXd::Random(5, 3);
    RngStream fit_rng(10);
    const std::vector<int> labels = nbm::k_median(points, 5, fit_rng, 20);
    CHECK(kmedian_cost(points, labels, 5) == doctest::Approx(0.0));
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("k_median is deterministic for a fixed stream") {
    RngStream data_rng(11);
    Eigen::MatrixXd points(30, 3);
    for (int i = 0; i < points.rows(); ++i)
        for (int j = 0; j < points.cols(); ++j)
            points(i, j) = data_rng.next_unit() - 0.5;
    RngStream first(12), second(12);
    CHECK(nbm::k_median(points, 4, first) == nbm::k_median(points, 4, second));
}

TEST_CASE("cluster_communities recovers a noiseless degree-corrected model") {
    // Two communities with heterogeneous node weights; every column block
    // of p is rank one, so the normalized rank-2 approximation separates
    // the communities exactly.
    const int n = 40;
    std::vector<int> truth(static_cast<std::size_t>(n));
    Eigen::VectorXd weight(n);
    RngStream rng(13);
    for (int i = 0; i < n; ++i) {
        truth[static_cast<std::size_t>(i)] = i % 2;
        weight(i) = 0.5 + rng.next_unit();
    }
    Eigen::MatrixXd b(2, 2);
    b << 0.9, 0.3, 0.3, 0.8;
    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int gi = truth[static_cast<std::size_t>(i)];
            const int gj = truth[static_cast<std::size_t>(j)];
            p(i, j) = weight(i) * weight(j) * b(gi, gj);
        }
    RngStream fit_rng(14);
    const NodeClustering found = nbm::cluster_communities(p, 2, fit_rng);
    const NodeClustering expected(truth, 2);
    CHECK(nbm::clustering_error(found, expected) == doctest::Approx(0.0));
}

TEST_CASE("cluster_communities returns nonempty communities on noisy data") {
    nbm::GeneratorConfig cfg;
    cfg.nodes = 60;
    cfg.communities = 3;
    cfg.metas = 1;
    cfg.omega = 0.4;
    cfg.seed = 15;
    const nbm::GeneratedNetwork net = nbm::generate_network(cfg);
    RngStream rng(16);
    const NodeClustering found =
        nbm::cluster_communities(net.graph.adjacency(), 3, rng);
    for (int size : found.group_sizes()) CHECK(size > 0);
}
