#include "nbm/selection.hpp"

#include "nbm/metrics.hpp"
#include "nbm/ssc.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nbm {

int select_k_dcbm(const Eigen::MatrixXd& a, int k_max) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || n == 0)
        throw ModelError("eigen-gap scan expects a square non-empty matrix");
    if (k_max < 1) throw ModelError("k_max must be positive");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw NumericError("eigendecomposition failed");
    std::vector<double> magnitude(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) magnitude[static_cast<std::size_t>(i)] = std::abs(eig.eigenvalues()(i));
    std::sort(magnitude.begin(), magnitude.end(), std::greater<double>());

    const int limit = std::min(k_max, n);
    int best_k = 1;
    double best_gap = -1.0;
    for (int k = 1; k <= limit; ++k) {
        const double current = magnitude[static_cast<std::size_t>(k - 1)];
        if (current <= 0.0) continue;  // relative gap undefined at zero
        const double next = k < n ? magnitude[static_cast<std::size_t>(k)] : 0.0;
        const double gap = (current - next) / current;
        if (gap > best_gap) {
            best_gap = gap;
            best_k = k;
        }
    }
    return best_k;
}

SelectionCriterion selection_criterion_from_string(const std::string& name) {
    if (name == "aic") return SelectionCriterion::aic;
    if (name == "bic") return SelectionCriterion::bic;
    if (name == "penalty") return SelectionCriterion::penalty;
    throw ModelError("unknown selection criterion: " + name);
}

const char* to_string(SelectionCriterion criterion) {
    switch (criterion) {
        case SelectionCriterion::aic: return "aic";
        case SelectionCriterion::bic: return "bic";
        case SelectionCriterion::penalty: return "penalty";
    }
    return "unknown";
}

namespace {

double criterion_value(const SymmetricGraph& graph, const FitResult& fit,
                       SelectionCriterion criterion, const FitOptions& opts) {
    const int n = graph.size();
    const double residual = (graph.adjacency() - fit.p_hat).squaredNorm();
    const double density = graph.density();
    const double count = parameter_count(fitted_model_kind(fit.k_hat, fit.l_hat),
                                         n, fit.k_hat, fit.l_hat);
    switch (criterion) {
        case SelectionCriterion::aic:
            return residual + 2.0 * density * count;
        case SelectionCriterion::bic:
            return residual +
                   std::log(0.5 * n * (n - 1.0)) * density * count;
        case SelectionCriterion::penalty:
            return residual + penalty_bar(n, fit.k_hat, fit.l_hat, opts.psi1,
                                          opts.psi2, opts.psi3);
    }
    throw ModelError("unknown selection criterion");
}

} // namespace

SelectionResult select_model(const SymmetricGraph& graph,
                             const SelectOptions& opts) {
    const int n = graph.size();
    if (opts.l_max < 1 || opts.l_max > n)
        throw ModelError("l_max must lie in 1..n");
    if (opts.k_max < 1) throw ModelError("k_max must be positive");

    std::vector<FitResult> fits;
    std::vector<SelectionCandidate> candidates;
    int best = -1;
    double best_value = std::numeric_limits<double>::infinity();

    for (int metas = 1; metas <= opts.l_max; ++metas) {
        // Meta split, then a community count per meta by eigen-gap.
        std::vector<int> meta_labels;
        if (metas == 1) {
            meta_labels.assign(static_cast<std::size_t>(n), 0);
        } else {
            SscOptions ssc_opts;
            ssc_opts.gammas = opts.fit_options.gammas;
            ssc_opts.tol = opts.fit_options.tol;
            ssc_opts.max_sweep_factor = opts.fit_options.max_sweep_factor;
            ssc_opts.seed = opts.fit_options.seed;
            ssc_opts.threads = opts.fit_options.threads;
            meta_labels = ssc_cluster(graph.adjacency(), metas, ssc_opts);
        }
        const MetaClustering split(meta_labels, metas);
        const auto members = split.members();

        std::vector<int> allocation(static_cast<std::size_t>(metas), 1);
        for (int l = 0; l < metas; ++l) {
            const auto& nodes = members[static_cast<std::size_t>(l)];
            Eigen::MatrixXd sub(nodes.size(), nodes.size());
            for (std::size_t a = 0; a < nodes.size(); ++a)
                for (std::size_t b = 0; b < nodes.size(); ++b)
                    sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                        graph.adjacency()(nodes[a], nodes[b]);
            allocation[static_cast<std::size_t>(l)] =
                select_k_dcbm(sub, std::min<int>(opts.k_max,
                                                 static_cast<int>(nodes.size())));
        }

        FitResult fit = fit_with_meta(graph, meta_labels, metas, allocation,
                                      opts.fit_options);
        SelectionCandidate candidate;
        candidate.metas = metas;
        candidate.communities = fit.k_hat;
        candidate.allocation = allocation;
        candidate.residual = (graph.adjacency() - fit.p_hat).squaredNorm();
        candidate.criterion =
            criterion_value(graph, fit, opts.criterion, opts.fit_options);
        candidates.push_back(std::move(candidate));
        fits.push_back(std::move(fit));

        if (candidates.back().criterion < best_value) {
            best_value = candidates.back().criterion;
            best = metas - 1;
        }
    }

    candidates[static_cast<std::size_t>(best)].chosen = true;
    return SelectionResult{std::move(fits[static_cast<std::size_t>(best)]),
                           std::move(candidates)};
}

} // namespace nbm
