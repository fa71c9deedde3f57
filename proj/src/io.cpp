#include "nbm/io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace nbm {

namespace {

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
    return rows;
}

Eigen::MatrixXd from_rows(const nlohmann::json& value, const char* what) {
    if (!value.is_array() || value.empty())
        throw DataError(std::string("expected a non-empty matrix for ") + what);
    const std::size_t rows = value.size();
    const std::size_t cols = value.front().is_array() ? value.front().size() : 0;
    if (cols == 0)
        throw DataError(std::string("expected matrix rows for ") + what);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!value[i].is_array() || value[i].size() != cols)
            throw DataError(std::string("ragged matrix rows for ") + what);
        for (std::size_t j = 0; j < cols; ++j) {
            if (!value[i][j].is_number())
                throw DataError(std::string("non-numeric matrix entry in ") + what);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                value[i][j].get<double>();
        }
    }
    return m;
}

std::vector<int> int_vector(const nlohmann::json& value, const char* what) {
    if (!value.is_array() || value.empty())
        throw DataError(std::string("expected a non-empty array for ") + what);
    std::vector<int> out;
    out.reserve(value.size());
    for (const auto& entry : value) {
        if (!entry.is_number_integer())
            throw DataError(std::string("non-integer entry in ") + what);
        out.push_back(entry.get<int>());
    }
    return out;
}

} // namespace

void write_edge_list(const std::string& path, const SymmetricGraph& graph) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    const int n = graph.size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (graph.adjacency()(i, j) != 0.0) out << i << ' ' << j << '\n';
    if (!out) throw DataError("write to " + path + " failed");
}

SymmetricGraph read_edge_list(const std::string& path, int nodes) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    std::vector<std::pair<int, int>> edges;
    int max_endpoint = -1;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        std::istringstream fields(line);
        long long a = 0, b = 0;
        if (!(fields >> a >> b))
            throw DataError(path + ":" + std::to_string(line_number) +
                            ": expected two node indices");
        std::string trailing;
        if (fields >> trailing)
            throw DataError(path + ":" + std::to_string(line_number) +
                            ": trailing content after the edge");
        if (a < 0 || b < 0)
            throw DataError(path + ":" + std::to_string(line_number) +
                            ": negative node index");
        if (a == b)
            throw DataError(path + ":" + std::to_string(line_number) +
                            ": self-loop");
        if (a > b) std::swap(a, b);
        edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        max_endpoint = std::max(max_endpoint, static_cast<int>(b));
    }
    if (nodes < 0) nodes = max_endpoint + 1;
    if (nodes <= 0) throw DataError(path + ": no edges and no node count given");
    if (max_endpoint >= nodes)
        throw DataError(path + ": node index " + std::to_string(max_endpoint) +
                        " outside 0.." + std::to_string(nodes - 1));

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nodes, nodes);
    for (const auto& [i, j] : edges) {
        if (a(i, j) != 0.0)
            throw DataError(path + ": duplicate edge " + std::to_string(i) + " " +
                            std::to_string(j));
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return SymmetricGraph(std::move(a));
}

void write_network_sidecar(const std::string& path, const GeneratorConfig& cfg,
                           const NbmParameters& params) {
    nlohmann::json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "nbm-network";
    doc["config"] = {{"nodes", cfg.nodes},
                     {"communities", cfg.communities},
                     {"metas", cfg.metas},
                     {"omega", cfg.omega},
                     {"b_min", cfg.b_min},
                     {"seed", cfg.seed}};
    doc["truth"] = {{"node_labels", params.communities.labels()},
                    {"community_metas", params.metas.labels()},
                    {"block_means", to_rows(params.block_means)},
                    {"profiles", to_rows(params.profiles)}};
    write_json(path, doc);
}

NetworkSidecar read_network_sidecar(const std::string& path) {
    const nlohmann::json doc = read_json(path);
    try {
        if (doc.at("format_version").get<int>() != kFormatVersion)
            throw DataError(path + ": unsupported format version");
        if (doc.at("kind").get<std::string>() != "nbm-network")
            throw DataError(path + ": not a network sidecar");

        const auto& cfg_json = doc.at("config");
        GeneratorConfig cfg;
        cfg.nodes = cfg_json.at("nodes").get<int>();
        cfg.communities = cfg_json.at("communities").get<int>();
        cfg.metas = cfg_json.at("metas").get<int>();
        cfg.omega = cfg_json.at("omega").get<double>();
        cfg.b_min = cfg_json.at("b_min").get<double>();
        cfg.seed = cfg_json.at("seed").get<std::uint64_t>();
        cfg.validate();

        const auto& truth = doc.at("truth");
        NodeClustering communities(int_vector(truth.at("node_labels"), "node_labels"),
                                   cfg.communities);
        MetaClustering metas(int_vector(truth.at("community_metas"), "community_metas"),
                             cfg.metas);
        NbmParameters params{from_rows(truth.at("block_means"), "block_means"),
                             from_rows(truth.at("profiles"), "profiles"),
                             std::move(communities), std::move(metas)};
        params.validate();
        return NetworkSidecar{cfg, std::move(params)};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    } catch (const ModelError& e) {
        throw DataError(path + ": " + e.what());
    }
}

nlohmann::json fit_report(const FitResult& fit, bool include_p_hat) {
    nlohmann::json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "nbm-fit";
    doc["communities"] = fit.k_hat;
    doc["metas"] = fit.l_hat;
    doc["node_labels"] = fit.communities.labels();
    doc["community_metas"] = fit.metas.labels();
    doc["objective"] = fit.objective;
    doc["penalty"] = fit.penalty;
    doc["block_sigma"] = to_rows(fit.block_sigma);
    if (include_p_hat) doc["p_hat"] = to_rows(fit.p_hat);
    return doc;
}

nlohmann::json selection_report(const SelectionResult& result,
                                bool include_p_hat) {
    nlohmann::json doc = fit_report(result.fit, include_p_hat);
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& candidate : result.candidates) {
        trace.push_back({{"metas", candidate.metas},
                         {"communities", candidate.communities},
                         {"allocation", candidate.allocation},
                         {"residual", candidate.residual},
                         {"criterion", candidate.criterion},
                         {"chosen", candidate.chosen}});
    }
    doc["candidates"] = std::move(trace);
    return doc;
}

void write_json(const std::string& path, const nlohmann::json& value) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << value.dump(2) << '\n';
    if (!out) throw DataError("write to " + path + " failed");
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

} // namespace nbm
