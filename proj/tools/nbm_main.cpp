#include "nbm/blocks.hpp"
#include "nbm/estimator.hpp"
#include "nbm/generator.hpp"
#include "nbm/io.hpp"
#include "nbm/metrics.hpp"
#include "nbm/parallel.hpp"
#include "nbm/selection.hpp"
#include "nbm/types.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Per-node meta-community labels induced by a two-level clustering.
std::vector<int> node_meta_labels(const nbm::NodeClustering& communities,
                                  const nbm::MetaClustering& metas) {
    std::vector<int> labels(static_cast<std::size_t>(communities.size()));
    for (int i = 0; i < communities.size(); ++i)
        labels[static_cast<std::size_t>(i)] = metas.label(communities.label(i));
    return labels;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      bool clamp) {
    std::ofstream out(path);
    if (!out) throw nbm::DataError("cannot open " + path + " for writing");
    char buffer[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            if (clamp) v = std::min(1.0, std::max(0.0, v));
            std::snprintf(buffer, sizeof(buffer), "%.17g", v);
            out << buffer << (j + 1 < m.cols() ? "," : "");
        }
        out << '\n';
    }
    if (!out) throw nbm::DataError("write to " + path + " failed");
}

struct SimulateArgs {
    nbm::GeneratorConfig config;
    std::string out_prefix;
};

int run_simulate(const SimulateArgs& args) {
    args.config.validate();
    const nbm::GeneratedNetwork network = nbm::generate_network(args.config);
    nbm::write_edge_list(args.out_prefix + ".edges", network.graph);
    nbm::write_network_sidecar(args.out_prefix + ".json", args.config,
                               network.params);
    std::cout << "wrote " << args.out_prefix << ".edges ("
              << static_cast<long>(network.graph.adjacency().sum() / 2.0)
              << " edges) and " << args.out_prefix << ".json\n";
    return 0;
}

struct FitArgs {
    std::string edges_path;
    std::string sidecar_path;
    int nodes = -1;
    int communities = 0;
    int metas = 0;
    bool select = false;
    int l_max = 3;
    int k_max = 8;
    std::string criterion = "aic";
    std::uint64_t seed = 0;
    double gamma1 = -1.0;
    double gamma2 = -1.0;
    std::string allocation;
    int threads = 0;
    std::string out_path;
    std::string p_hat_path;
    bool clamp = false;
};

std::vector<int> parse_allocation(const std::string& text) {
    std::vector<int> result;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            result.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw nbm::ModelError("bad allocation entry: " + item);
        }
    }
    if (result.empty()) throw nbm::ModelError("empty allocation list");
    return result;
}

int run_fit(const FitArgs& args) {
    std::optional<nbm::NetworkSidecar> sidecar;
    if (!args.sidecar_path.empty())
        sidecar = nbm::read_network_sidecar(args.sidecar_path);

    int nodes = args.nodes;
    if (nodes < 0 && sidecar) nodes = sidecar->config.nodes;
    const nbm::SymmetricGraph graph = nbm::read_edge_list(args.edges_path, nodes);
    if (sidecar && graph.size() != sidecar->config.nodes)
        throw nbm::DataError("edge list and sidecar disagree on the node count");

    nbm::FitOptions fit_opts;
    fit_opts.seed = args.seed;
    fit_opts.threads = nbm::resolve_threads(args.threads);
    if (args.gamma1 >= 0.0 || args.gamma2 >= 0.0) {
        if (args.gamma1 < 0.0 || args.gamma2 < 0.0)
            throw nbm::ModelError("provide both --gamma1 and --gamma2 or neither");
        fit_opts.gammas = {args.gamma1, args.gamma2};
    }
    if (!args.allocation.empty())
        fit_opts.allocation = parse_allocation(args.allocation);

    nlohmann::json report;
    const nbm::FitResult* fit = nullptr;
    std::optional<nbm::FitResult> fixed;
    std::optional<nbm::SelectionResult> selected;

    if (args.select) {
        nbm::SelectOptions select_opts;
        select_opts.l_max = args.l_max;
        select_opts.k_max = args.k_max;
        select_opts.criterion = nbm::selection_criterion_from_string(args.criterion);
        select_opts.fit_options = fit_opts;
        selected = nbm::select_model(graph, select_opts);
        report = nbm::selection_report(*selected);
        fit = &selected->fit;
    } else {
        if (args.communities < 1 || args.metas < 1)
            throw nbm::ModelError(
                "give --communities and --metas, or use --select");
        fixed = nbm::fit(graph, args.communities, args.metas, fit_opts);
        report = nbm::fit_report(*fixed);
        fit = &*fixed;
    }

    if (sidecar) {
        const nbm::ProbabilityMatrix truth_p = nbm::build_probability(sidecar->params);
        const std::vector<int> truth_meta =
            node_meta_labels(sidecar->params.communities, sidecar->params.metas);
        const std::vector<int> fitted_meta =
            node_meta_labels(fit->communities, fit->metas);
        report["truth_metrics"] = {
            {"community_error",
             nbm::clustering_error(sidecar->params.communities, fit->communities)},
            {"meta_error",
             nbm::clustering_error(truth_meta, sidecar->params.metas.groups(),
                                   fitted_meta, fit->l_hat)},
            {"estimation_error",
             nbm::estimation_error(fit->p_hat, truth_p.values(),
                                   nbm::fitted_model_kind(fit->k_hat, fit->l_hat),
                                   fit->k_hat, fit->l_hat)}};
    }

    if (!args.p_hat_path.empty())
        write_matrix_csv(args.p_hat_path, fit->p_hat, args.clamp);

    if (args.out_path.empty())
        std::cout << report.dump(2) << '\n';
    else
        nbm::write_json(args.out_path, report);
    return 0;
}

struct BenchmarkArgs {
    std::string grid_path;
    std::string out_path;
    int threads = 0;
};

struct BenchmarkCell {
    nbm::GeneratorConfig config;  // seed filled per replicate
};

struct ReplicateMetrics {
    // Indexed by fit model; NaN marks "not applicable".
    std::vector<double> community_error;
    std::vector<double> meta_error;
    std::vector<double> estimation_error;
};

double mean_of(const std::vector<double>& values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

double sd_of(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double mean = mean_of(values);
    double total = 0.0;
    for (double v : values) total += (v - mean) * (v - mean);
    return std::sqrt(total / static_cast<double>(values.size() - 1));
}

int run_benchmark(const BenchmarkArgs& args) {
    const nlohmann::json grid = nbm::read_json(args.grid_path);
    std::uint64_t seed = 0;
    int replicates = 0;
    std::vector<BenchmarkCell> cells;
    std::vector<std::string> fit_names;
    try {
        if (grid.at("format_version").get<int>() != nbm::kFormatVersion)
            throw nbm::DataError(args.grid_path + ": unsupported format version");
        seed = grid.at("seed").get<std::uint64_t>();
        replicates = grid.at("replicates").get<int>();
        for (const auto& cell : grid.at("cells")) {
            BenchmarkCell parsed;
            parsed.config.nodes = cell.at("nodes").get<int>();
            parsed.config.communities = cell.at("communities").get<int>();
            parsed.config.metas = cell.at("metas").get<int>();
            parsed.config.omega = cell.at("omega").get<double>();
            if (cell.contains("b_min"))
                parsed.config.b_min = cell.at("b_min").get<double>();
            cells.push_back(parsed);
        }
        fit_names = grid.at("fits").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw nbm::DataError(args.grid_path + ": " + e.what());
    }
    if (replicates < 1)
        throw nbm::DataError(args.grid_path + ": replicates must be positive");
    if (cells.empty()) throw nbm::DataError(args.grid_path + ": no cells");
    if (fit_names.empty()) throw nbm::DataError(args.grid_path + ": no fits");
    for (const auto& name : fit_names)
        if (name != "dcbm" && name != "nbm" && name != "pabm")
            throw nbm::DataError(args.grid_path + ": unknown fit model " + name);
    for (const auto& cell : cells) cell.config.validate();

    // One task per (cell, replicate); every task owns its output slot, so
    // scheduling cannot change the results.
    const int fit_count = static_cast<int>(fit_names.size());
    const int task_count = static_cast<int>(cells.size()) * replicates;
    std::vector<ReplicateMetrics> slots(static_cast<std::size_t>(task_count));
    nbm::parallel_for(task_count, nbm::resolve_threads(args.threads), [&](int task) {
        const int cell_index = task / replicates;
        const int replicate = task % replicates;
        nbm::GeneratorConfig config = cells[static_cast<std::size_t>(cell_index)].config;
        config.seed = nbm::RngStream::derive(seed, "cell",
                                             static_cast<std::uint64_t>(cell_index),
                                             static_cast<std::uint64_t>(replicate))
                          .next_u64();
        const nbm::GeneratedNetwork network = nbm::generate_network(config);
        const std::vector<int> truth_meta =
            node_meta_labels(network.params.communities, network.params.metas);

        nbm::FitOptions fit_opts;
        fit_opts.seed = nbm::RngStream::derive(seed, "fit",
                                               static_cast<std::uint64_t>(cell_index),
                                               static_cast<std::uint64_t>(replicate))
                            .next_u64();
        fit_opts.threads = 1;

        ReplicateMetrics metrics;
        metrics.community_error.resize(static_cast<std::size_t>(fit_count));
        metrics.meta_error.resize(static_cast<std::size_t>(fit_count));
        metrics.estimation_error.resize(static_cast<std::size_t>(fit_count));
        for (int f = 0; f < fit_count; ++f) {
            const std::string& name = fit_names[static_cast<std::size_t>(f)];
            const int k = config.communities;
            const int l = name == "dcbm" ? 1 : name == "pabm" ? k : config.metas;
            const nbm::FitResult fit = nbm::fit(network.graph, k, l, fit_opts);
            metrics.community_error[static_cast<std::size_t>(f)] =
                nbm::clustering_error(network.params.communities, fit.communities);
            if (name == "nbm") {
                const std::vector<int> fitted_meta =
                    node_meta_labels(fit.communities, fit.metas);
                metrics.meta_error[static_cast<std::size_t>(f)] =
                    nbm::clustering_error(truth_meta, network.params.metas.groups(),
                                          fitted_meta, fit.l_hat);
            } else {
                metrics.meta_error[static_cast<std::size_t>(f)] =
                    std::numeric_limits<double>::quiet_NaN();
            }
            metrics.estimation_error[static_cast<std::size_t>(f)] =
                nbm::estimation_error(fit.p_hat, network.probabilities.values(),
                                      nbm::fitted_model_kind(fit.k_hat, fit.l_hat),
                                      fit.k_hat, fit.l_hat);
        }
        slots[static_cast<std::size_t>(task)] = std::move(metrics);
    });

    std::ofstream out(args.out_path);
    if (!out) throw nbm::DataError("cannot open " + args.out_path + " for writing");
    out << "format_version,nodes,communities,metas,omega,fit_model,replicates,"
           "community_error_mean,community_error_sd,meta_error_mean,"
           "meta_error_sd,estimation_error_mean,estimation_error_sd\n";
    char buffer[64];
    const auto emit = [&](double v) {
        if (std::isnan(v)) return std::string();
        std::snprintf(buffer, sizeof(buffer), "%.8f", v);
        return std::string(buffer);
    };
    for (std::size_t cell_index = 0; cell_index < cells.size(); ++cell_index) {
        const auto& config = cells[cell_index].config;
        for (int f = 0; f < fit_count; ++f) {
            std::vector<double> community, meta, estimation;
            bool has_meta = true;
            for (int r = 0; r < replicates; ++r) {
                const auto& slot =
                    slots[cell_index * static_cast<std::size_t>(replicates) +
                          static_cast<std::size_t>(r)];
                community.push_back(slot.community_error[static_cast<std::size_t>(f)]);
                const double m = slot.meta_error[static_cast<std::size_t>(f)];
                if (std::isnan(m))
                    has_meta = false;
                else
                    meta.push_back(m);
                estimation.push_back(slot.estimation_error[static_cast<std::size_t>(f)]);
            }
            const double nan = std::numeric_limits<double>::quiet_NaN();
            out << nbm::kFormatVersion << ',' << config.nodes << ','
                << config.communities << ',' << config.metas << ','
                << emit(config.omega) << ','
                << fit_names[static_cast<std::size_t>(f)] << ',' << replicates
                << ',' << emit(mean_of(community)) << ',' << emit(sd_of(community))
                << ',' << emit(has_meta ? mean_of(meta) : nan) << ','
                << emit(has_meta ? sd_of(meta) : nan) << ','
                << emit(mean_of(estimation)) << ',' << emit(sd_of(estimation))
                << '\n';
        }
    }
    if (!out) throw nbm::DataError("write to " + args.out_path + " failed");
    std::cout << "wrote " << args.out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested block models: simulate networks, fit and select "
                 "block structure, run benchmark grids"};
    app.require_subcommand(1);

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Sample a network and write an edge list plus truth sidecar");
    simulate->add_option("--nodes", simulate_args.config.nodes, "Node count")
        ->required();
    simulate
        ->add_option("--communities", simulate_args.config.communities,
                     "Community count")
        ->required();
    simulate->add_option("--metas", simulate_args.config.metas,
                         "Meta-community count")
        ->required();
    simulate->add_option("--omega", simulate_args.config.omega,
                         "Off-diagonal damping in (0, 1)");
    simulate->add_option("--b-min", simulate_args.config.b_min,
                         "Lower bound of the base block-mean draw");
    simulate->add_option("--seed", simulate_args.config.seed, "Random seed");
    simulate->add_option("--out", simulate_args.out_prefix,
                         "Output prefix (.edges and .json are appended)")
        ->required();

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand(
        "fit", "Fit block structure to an edge list, optionally selecting K and L");
    fit->add_option("--edges", fit_args.edges_path, "Edge-list file")->required();
    fit->add_option("--sidecar", fit_args.sidecar_path,
                    "Truth sidecar; adds accuracy metrics to the report");
    fit->add_option("--nodes", fit_args.nodes,
                    "Node count (default: sidecar, else inferred)");
    fit->add_option("--communities", fit_args.communities, "Community count K");
    fit->add_option("--metas", fit_args.metas, "Meta-community count L");
    fit->add_flag("--select", fit_args.select, "Select K and L automatically");
    fit->add_option("--l-max", fit_args.l_max, "Largest L tried by --select");
    fit->add_option("--k-max", fit_args.k_max,
                    "Cap of the per-meta community scan under --select");
    fit->add_option("--criterion", fit_args.criterion,
                    "Selection criterion: aic, bic or penalty");
    fit->add_option("--seed", fit_args.seed, "Random seed");
    fit->add_option("--gamma1", fit_args.gamma1, "Sparsity weight override");
    fit->add_option("--gamma2", fit_args.gamma2, "Ridge weight override");
    fit->add_option("--allocation", fit_args.allocation,
                    "Communities per meta, comma-separated (e.g. 2,2)");
    fit->add_option("--threads", fit_args.threads,
                    "Worker threads (0 = hardware, capped by NBM_THREADS)");
    fit->add_option("--out", fit_args.out_path, "Report path (default: stdout)");
    fit->add_option("--p-hat", fit_args.p_hat_path,
                    "Write the dense probability estimate as CSV");
    fit->add_flag("--clamp", fit_args.clamp,
                  "Clamp the exported estimate to [0, 1]");

    BenchmarkArgs benchmark_args;
    CLI::App* benchmark = app.add_subcommand(
        "benchmark", "Replicate a grid of generated cells and tabulate errors");
    benchmark->add_option("--grid", benchmark_args.grid_path, "Grid JSON file")
        ->required();
    benchmark->add_option("--out", benchmark_args.out_path, "Output CSV path")
        ->required();
    benchmark->add_option("--threads", benchmark_args.threads,
                          "Worker threads (0 = hardware, capped by NBM_THREADS)");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (fit->parsed()) return run_fit(fit_args);
        if (benchmark->parsed()) return run_benchmark(benchmark_args);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    } catch (const nbm::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const nbm::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const nbm::ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
