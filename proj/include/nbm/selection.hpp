#pragma once

#include "nbm/estimator.hpp"
#include "nbm/types.hpp"

#include <vector>

namespace nbm {

/// Community count by the largest relative eigen-gap: the k in 1..k_max
/// maximizing (|lambda_k| - |lambda_k+1|) / |lambda_k| over the magnitude-
/// sorted spectrum (eigenvalues past the dimension count as zero).  Ties
/// and all-zero spectra resolve to the smallest k.
int select_k_dcbm(const Eigen::MatrixXd& a, int k_max);

enum class SelectionCriterion { aic, bic, penalty };

SelectionCriterion selection_criterion_from_string(const std::string& name);
const char* to_string(SelectionCriterion criterion);

/// One candidate of the model-selection sweep.
struct SelectionCandidate {
    int metas = 0;
    int communities = 0;
    std::vector<int> allocation;  // communities per meta
    double residual = 0.0;        // |A - p_hat|_F^2
    double criterion = 0.0;
    bool chosen = false;
};

struct SelectionResult {
    FitResult fit;
    std::vector<SelectionCandidate> candidates;
};

struct SelectOptions {
    int l_max = 3;
    int k_max = 8;             // cap for the per-meta eigen-gap scan
    SelectionCriterion criterion = SelectionCriterion::aic;
    FitOptions fit_options;
};

/// Sweep L = 1..l_max: split nodes into L meta-communities, pick each
/// meta's community count by eigen-gap, fit, and keep the L of smallest
/// criterion value (ties to the smaller L).  The criterion adds to the
/// residual 2 * density * #parameters (aic), ln(n(n-1)/2) * density *
/// #parameters (bic), or the psi-penalty (penalty).
SelectionResult select_model(const SymmetricGraph& graph,
                             const SelectOptions& opts = {});

} // namespace nbm
