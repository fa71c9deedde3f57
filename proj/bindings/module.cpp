#include "nbm/blocks.hpp"
#include "nbm/dcbm.hpp"
#include "nbm/estimator.hpp"
#include "nbm/generator.hpp"
#include "nbm/metrics.hpp"
#include "nbm/selection.hpp"
#include "nbm/ssc.hpp"
#include "nbm/types.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>
#include <vector>

namespace py = pybind11;

namespace {

nbm::FitOptions make_fit_options(
    std::optional<std::pair<double, double>> gammas,
    std::optional<std::vector<int>> allocation, std::uint64_t seed,
    int threads) {
    nbm::FitOptions opts;
    opts.gammas = std::move(gammas);
    opts.allocation = std::move(allocation);
    opts.seed = seed;
    opts.threads = threads;
    return opts;
}

py::dict fit_to_dict(const nbm::FitResult& fit) {
    py::dict out;
    out["node_labels"] = fit.communities.labels();
    out["community_metas"] = fit.metas.labels();
    out["communities"] = fit.k_hat;
    out["metas"] = fit.l_hat;
    out["objective"] = fit.objective;
    out["penalty"] = fit.penalty;
    out["p_hat"] = fit.p_hat;
    out["block_sigma"] = fit.block_sigma;
    return out;
}

} // namespace

PYBIND11_MODULE(_nbm, m) {
    m.doc() = "Nested block models: generation, two-level clustering, "
              "rank-one block estimation and model selection";

    py::register_exception<nbm::ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<nbm::NumericError>(m, "NumericError",
                                              PyExc_RuntimeError);

    m.def(
        "generate",
        [](int nodes, int communities, int metas, double omega,
           std::uint64_t seed, double b_min) {
            nbm::GeneratorConfig cfg;
            cfg.nodes = nodes;
            cfg.communities = communities;
            cfg.metas = metas;
            cfg.omega = omega;
            cfg.seed = seed;
            cfg.b_min = b_min;
            const nbm::GeneratedNetwork network = nbm::generate_network(cfg);
            py::dict out;
            out["adjacency"] = network.graph.adjacency();
            out["probabilities"] = network.probabilities.values();
            out["block_means"] = network.params.block_means;
            out["profiles"] = network.params.profiles;
            out["node_labels"] = network.params.communities.labels();
            out["community_metas"] = network.params.metas.labels();
            return out;
        },
        py::arg("nodes"), py::arg("communities"), py::arg("metas"),
        py::arg("omega") = 0.5, py::arg("seed") = 0, py::arg("b_min") = 0.35,
        "Sample a balanced synthetic network; returns the adjacency, the "
        "edge probabilities and the ground truth.");

    m.def(
        "fit",
        [](const Eigen::MatrixXd& adjacency, int communities, int metas,
           std::uint64_t seed, std::optional<std::pair<double, double>> gammas,
           std::optional<std::vector<int>> allocation, int threads) {
            const nbm::SymmetricGraph graph(adjacency);
            return fit_to_dict(nbm::fit(
                graph, communities, metas,
                make_fit_options(std::move(gammas), std::move(allocation), seed,
                                 threads)));
        },
        py::arg("adjacency"), py::arg("communities"), py::arg("metas"),
        py::arg("seed") = 0, py::arg("gammas") = py::none(),
        py::arg("allocation") = py::none(), py::arg("threads") = 1,
        "Two-step fit with fixed community and meta-community counts.");

    m.def(
        "select",
        [](const Eigen::MatrixXd& adjacency, int l_max, int k_max,
           const std::string& criterion, std::uint64_t seed, int threads) {
            const nbm::SymmetricGraph graph(adjacency);
            nbm::SelectOptions opts;
            opts.l_max = l_max;
            opts.k_max = k_max;
            opts.criterion = nbm::selection_criterion_from_string(criterion);
            opts.fit_options.seed = seed;
            opts.fit_options.threads = threads;
            const nbm::SelectionResult result = nbm::select_model(graph, opts);
            py::dict out = fit_to_dict(result.fit);
            py::list candidates;
            for (const auto& candidate : result.candidates) {
                py::dict c;
                c["metas"] = candidate.metas;
                c["communities"] = candidate.communities;
                c["allocation"] = candidate.allocation;
                c["residual"] = candidate.residual;
                c["criterion"] = candidate.criterion;
                c["chosen"] = candidate.chosen;
                candidates.append(std::move(c));
            }
            out["candidates"] = std::move(candidates);
            return out;
        },
        py::arg("adjacency"), py::arg("l_max") = 3, py::arg("k_max") = 8,
        py::arg("criterion") = "aic", py::arg("seed") = 0, py::arg("threads") = 1,
        "Sweep the meta-community count and pick the best penalized fit.");

    m.def(
        "ssc_cluster",
        [](const Eigen::MatrixXd& a, int clusters,
           std::optional<std::pair<double, double>> gammas, std::uint64_t seed,
           int threads) {
            nbm::SscOptions opts;
            opts.gammas = std::move(gammas);
            opts.seed = seed;
            opts.threads = threads;
            return nbm::ssc_cluster(a, clusters, opts);
        },
        py::arg("a"), py::arg("clusters"), py::arg("gammas") = py::none(),
        py::arg("seed") = 0, py::arg("threads") = 1,
        "Subspace self-representation plus normalized spectral cut.");

    m.def(
        "cluster_communities",
        [](const Eigen::MatrixXd& a, int communities, std::uint64_t seed) {
            nbm::RngStream rng = nbm::RngStream::derive(seed, "communities", 0);
            return nbm::cluster_communities(a, communities, rng).labels();
        },
        py::arg("a"), py::arg("communities"), py::arg("seed") = 0,
        "Spectral k-median community detection.");

    m.def("rank_one_project", &nbm::rank_one_project, py::arg("m"),
          "Best rank-one approximation.");

    m.def(
        "objective",
        [](const Eigen::MatrixXd& a, const std::vector<int>& node_labels,
           int communities, const std::vector<int>& community_metas, int metas) {
            return nbm::objective(a, nbm::NodeClustering(node_labels, communities),
                                  nbm::MetaClustering(community_metas, metas));
        },
        py::arg("a"), py::arg("node_labels"), py::arg("communities"),
        py::arg("community_metas"), py::arg("metas"),
        "Rank-one block residual of a two-level clustering.");

    m.def(
        "clustering_error",
        [](const std::vector<int>& truth, int truth_groups,
           const std::vector<int>& estimate, int estimate_groups) {
            return nbm::clustering_error(truth, truth_groups, estimate,
                                         estimate_groups);
        },
        py::arg("truth"), py::arg("truth_groups"), py::arg("estimate"),
        py::arg("estimate_groups"),
        "Label-permutation-minimal disagreement fraction.");

    m.def(
        "estimation_error",
        [](const Eigen::MatrixXd& p_hat, const Eigen::MatrixXd& p,
           const std::string& model, int communities, int metas) {
            return nbm::estimation_error(p_hat, p,
                                         nbm::model_kind_from_string(model),
                                         communities, metas);
        },
        py::arg("p_hat"), py::arg("p"), py::arg("model"), py::arg("communities"),
        py::arg("metas"),
        "Squared error plus the parameter-count penalty, scaled by n^-2.");

    m.def("default_gammas", &nbm::default_gammas, py::arg("a"),
          "Density rule for the elastic-net weights.");
}
