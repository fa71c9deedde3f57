#pragma once

#include "nbm/estimator.hpp"
#include "nbm/generator.hpp"
#include "nbm/selection.hpp"
#include "nbm/types.hpp"

#include <json.hpp>

#include <string>

namespace nbm {

/// Missing, malformed or inconsistent input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;

/// Plain-text edge list: one "i j" pair per line, 0-based, i < j, sorted
/// by (i, j).
void write_edge_list(const std::string& path, const SymmetricGraph& graph);

/// Inverse of write_edge_list.  `nodes` fixes the node count; when
/// negative it is inferred as the largest endpoint + 1.  Reading
/// tolerates swapped endpoints but rejects self-loops, duplicates and
/// out-of-range indices.
SymmetricGraph read_edge_list(const std::string& path, int nodes = -1);

/// Ground truth and configuration of a generated network.  The
/// probability matrix is not stored; it is rebuilt exactly from the
/// parameters.
struct NetworkSidecar {
    GeneratorConfig config;
    NbmParameters params;
};

void write_network_sidecar(const std::string& path, const GeneratorConfig& cfg,
                           const NbmParameters& params);
NetworkSidecar read_network_sidecar(const std::string& path);

/// Fit summary as JSON: labels, counts, objective, penalty, per-block
/// leading singular values; the dense estimate only on request.
nlohmann::json fit_report(const FitResult& fit, bool include_p_hat = false);

/// Selection trace appended to the chosen fit's report.
nlohmann::json selection_report(const SelectionResult& result,
                                bool include_p_hat = false);

void write_json(const std::string& path, const nlohmann::json& value);
nlohmann::json read_json(const std::string& path);

} // namespace nbm
