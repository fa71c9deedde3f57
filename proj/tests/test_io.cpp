#include "nbm/blocks.hpp"
#include "nbm/estimator.hpp"
#include "nbm/generator.hpp"
#include "nbm/io.hpp"
#include "nbm/selection.hpp"
#include "nbm/types.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

using nbm::DataError;
using nbm::SymmetricGraph;

namespace {

// Scratch file under the system temp directory, removed on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& name)
        : path_((std::filesystem::temp_directory_path() /
                 ("nbm_io_test_" + name))
                    .string()) {}
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

nbm::GeneratedNetwork sample_network(int nodes, int communities, int metas,
                                     std::uint64_t seed) {
    nbm::GeneratorConfig cfg;
    cfg.nodes = nodes;
    cfg.communities = communities;
    cfg.metas = metas;
    cfg.seed = seed;
    return nbm::generate_network(cfg);
}

} // namespace

TEST_CASE("edge list round-trips a sampled graph") {
    const nbm::GeneratedNetwork net = sample_network(24, 2, 1, 1);
    TempFile file("roundtrip.edges");
    nbm::write_edge_list(file.path(), net.graph);
    const SymmetricGraph back = nbm::read_edge_list(file.path(), 24);
    CHECK((back.adjacency() - net.graph.adjacency()).isZero(0.0));

    // The writer emits sorted "i j" lines with i < j.
    std::ifstream in(file.path());
    int prev_i = -1, prev_j = -1, i = 0, j = 0;
    while (in >> i >> j) {
        CHECK(i < j);
        CHECK((i > prev_i || (i == prev_i && j > prev_j)));
        prev_i = i;
        prev_j = j;
    }
}

TEST_CASE("edge list reader infers the node count when unset") {
    TempFile file("inferred.edges");
    write_text(file.path(), "0 2\n1 4\n");
    const SymmetricGraph g = nbm::read_edge_list(file.path());
    CHECK(g.size() == 5);
    CHECK(g.adjacency()(0, 2) == 1.0);
    CHECK(g.adjacency()(4, 1) == 1.0);
    CHECK(g.adjacency().sum() == 4.0);
}

TEST_CASE("edge list reader accepts swapped endpoints") {
    TempFile file("swapped.edges");
    write_text(file.path(), "3 1\n0 2\n");
    const SymmetricGraph g = nbm::read_edge_list(file.path(), 4);
    CHECK(g.adjacency()(1, 3) == 1.0);
    CHECK(g.adjacency()(2, 0) == 1.0);
}

TEST_CASE("edge list reader handles empty input") {
    TempFile file("empty.edges");
    write_text(file.path(), "");
    const SymmetricGraph g = nbm::read_edge_list(file.path(), 3);
    CHECK(g.size() == 3);
    CHECK(g.adjacency().isZero(0.0));
    // Without a node count an empty list has no size to infer.
    CHECK_THROWS_AS(nbm::read_edge_list(file.path()), DataError);
}

TEST_CASE("edge list reader rejects malformed input") {
    TempFile file("bad.edges");
    CHECK_THROWS_AS(nbm::read_edge_list("/nonexistent/zzz.edges", 4), DataError);

    write_text(file.path(), "1 1\n");
    CHECK_THROWS_AS(nbm::read_edge_list(file.path(), 4), DataError); // loop
    write_text(file.path(), "0 1\n1 0\n");
    CHECK_THROWS_AS(nbm::read_edge_list(file.path(), 4), DataError); // dup
    write_text(file.path(), "0 1\n0 1\n");
    CHECK_THROWS_AS(nbm::read_edge_list(file.path(), 4), DataError); // dup
    write_text(file.path(), "-1 2\n");
    CHECK_THROWS_AS(nbm::read_edge_list(file.path(), 4), DataError); // negative
    write_text(file.path(), "0 4\n");
    CHECK_THROWS_AS(nbm::read_edge_list(file.path(), 4), DataError); // range
    write_text(file.path(), "0 1 7\n");
    CHECK_THROWS_AS(nbm::read_edge_list(file.path(), 4), DataError); // extra
    write_text(file.path(), "0 x\n");
    CHECK_THROWS_AS(nbm::read_edge_list(file.path(), 4), DataError); // text
}

TEST_CASE("network sidecar round-trips config and truth") {
    nbm::GeneratorConfig cfg;
    cfg.nodes = 24;
    cfg.communities = 4;
    cfg.metas = 2;
    cfg.seed = 2;
    const nbm::GeneratedNetwork net = nbm::generate_network(cfg);
    TempFile file("net.json");
    nbm::write_network_sidecar(file.path(), cfg, net.params);
    const nbm::NetworkSidecar back = nbm::read_network_sidecar(file.path());

    CHECK(back.config.nodes == 24);
    CHECK(back.config.communities == 4);
    CHECK(back.config.metas == 2);
    CHECK(back.config.seed == 2);
    CHECK(back.params.communities == net.params.communities);
    CHECK(back.params.metas == net.params.metas);
    CHECK((back.params.block_means - net.params.block_means).isZero(0.0));
    CHECK((back.params.profiles - net.params.profiles).isZero(0.0));

    // The probability matrix rebuilds exactly from the stored parameters.
    CHECK((nbm::build_probability(back.params).values() -
           nbm::build_probability(net.params).values())
              .isZero(0.0));
}

TEST_CASE("network sidecar rejects corrupt documents") {
    nbm::GeneratorConfig cfg;
    cfg.nodes = 12;
    cfg.communities = 2;
    cfg.metas = 1;
    cfg.seed = 3;
    const nbm::GeneratedNetwork net = nbm::generate_network(cfg);
    TempFile file("corrupt.json");
    nbm::write_network_sidecar(file.path(), cfg, net.params);
    nlohmann::json good = nbm::read_json(file.path());

    CHECK_THROWS_AS(nbm::read_network_sidecar("/nonexistent/zzz.json"),
                    DataError);

    write_text(file.path(), "{ not json");
    CHECK_THROWS_AS(nbm::read_network_sidecar(file.path()), DataError);

    nlohmann::json bad = good;
    bad["kind"] = "nbm-fit";
    nbm::write_json(file.path(), bad);
    CHECK_THROWS_AS(nbm::read_network_sidecar(file.path()), DataError);

    bad = good;
    bad["format_version"] = 99;
    nbm::write_json(file.path(), bad);
    CHECK_THROWS_AS(nbm::read_network_sidecar(file.path()), DataError);

    bad = good;
    bad["truth"].erase("node_labels");
    nbm::write_json(file.path(), bad);
    CHECK_THROWS_AS(nbm::read_network_sidecar(file.path()), DataError);

    bad = good;
    bad["truth"]["profiles"][0] = {0.5};  // ragged row
    nbm::write_json(file.path(), bad);
    CHECK_THROWS_AS(nbm::read_network_sidecar(file.path()), DataError);

    bad = good;
    bad["truth"]["node_labels"][0] = "zero";  // non-numeric label
    nbm::write_json(file.path(), bad);
    CHECK_THROWS_AS(nbm::read_network_sidecar(file.path()), DataError);

    bad = good;
    bad["config"]["omega"] = 1.5;  // fails parameter validation
    nbm::write_json(file.path(), bad);
    CHECK_THROWS_AS(nbm::read_network_sidecar(file.path()), DataError);
}

TEST_CASE("fit report carries labels and diagnostics") {
    const nbm::GeneratedNetwork net = sample_network(40, 4, 2, 4);
    nbm::FitOptions opts;
    opts.seed = 5;
    const nbm::FitResult fit = nbm::fit(net.graph, 4, 2, opts);

    const nlohmann::json report = nbm::fit_report(fit);
    CHECK(report.at("format_version") == nbm::kFormatVersion);
    CHECK(report.at("kind") == "nbm-fit");
    CHECK(report.at("communities") == 4);
    CHECK(report.at("metas") == 2);
    CHECK(report.at("node_labels").size() == 40);
    CHECK(report.at("community_metas").size() == 4);
    CHECK(report.at("objective").get<double>() == fit.objective);
    CHECK(report.at("penalty").get<double>() == fit.penalty);
    CHECK(report.at("block_sigma").size() == 2);
    CHECK(!report.contains("p_hat"));

    const nlohmann::json with_estimate = nbm::fit_report(fit, true);
    REQUIRE(with_estimate.contains("p_hat"));
    CHECK(with_estimate.at("p_hat").size() == 40);
    CHECK(with_estimate.at("p_hat").at(0).size() == 40);
}

TEST_CASE("selection report traces every candidate") {
    const nbm::GeneratedNetwork net = sample_network(60, 2, 1, 6);
    nbm::SelectOptions opts;
    opts.l_max = 2;
    opts.k_max = 3;
    opts.fit_options.seed = 7;
    const nbm::SelectionResult res = nbm::select_model(net.graph, opts);

    const nlohmann::json report = nbm::selection_report(res);
    CHECK(report.at("kind") == "nbm-fit");
    REQUIRE(report.contains("candidates"));
    REQUIRE(report.at("candidates").size() == 2);
    int chosen = 0;
    for (const auto& cand : report.at("candidates")) {
        CHECK(cand.contains("metas"));
        CHECK(cand.contains("communities"));
        CHECK(cand.contains("allocation"));
        CHECK(cand.contains("residual"));
        CHECK(cand.contains("criterion"));
        if (cand.at("chosen").get<bool>()) ++chosen;
    }
    CHECK(chosen == 1);
}

TEST_CASE("write_json emits readable indented output") {
    TempFile file("value.json");
    const nlohmann::json value = {{"alpha", 1}, {"beta", {1, 2, 3}}};
    nbm::write_json(file.path(), value);
    const std::string text = read_text(file.path());
    CHECK(text.back() == '\n');
    CHECK(nbm::read_json(file.path()) == value);
    CHECK_THROWS_AS(nbm::read_json("/nonexistent/zzz.json"), DataError);
    write_text(file.path(), "garbage");
    CHECK_THROWS_AS(nbm::read_json(file.path()), DataError);
}
