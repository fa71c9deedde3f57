#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nbm {

/// Invalid model objects or arguments (wrong shapes, label gaps, ...).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure of an algorithm (non-convergence, degeneracy, ...).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Elastic-net coordinate descent stopped before reaching tolerance.
class SolverError : public NumericError {
public:
    SolverError(const std::string& message, double kkt_residual)
        : NumericError(message), kkt_residual(kkt_residual) {}

    double kkt_residual;
};

/// Affinity too disconnected for the requested number of spectral clusters.
class DegenerateAffinityError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Partition of items 0..size-1 into groups 0..groups-1, every group
/// nonempty.  Used both for nodes -> communities and, via the
/// MetaClustering alias, for communities -> meta-communities.
class NodeClustering {
public:
    NodeClustering(std::vector<int> labels, int groups);

    int size() const { return static_cast<int>(labels_.size()); }
    int groups() const { return groups_; }
    int label(int item) const { return labels_[static_cast<std::size_t>(item)]; }
    const std::vector<int>& labels() const { return labels_; }

    std::vector<int> group_sizes() const;
    std::vector<std::vector<int>> members() const;

    /// size x groups 0/1 membership matrix.
    Eigen::MatrixXd indicator() const;

    bool operator==(const NodeClustering& other) const {
        return groups_ == other.groups_ && labels_ == other.labels_;
    }

private:
    std::vector<int> labels_;
    int groups_;
};

/// Assignment of communities to meta-communities; same invariants as a
/// node clustering, the items just happen to be communities.
using MetaClustering = NodeClustering;

/// Simple undirected graph held as a dense 0/1 adjacency matrix with a
/// zero diagonal.
class SymmetricGraph {
public:
    explicit SymmetricGraph(Eigen::MatrixXd adjacency);

    int size() const { return static_cast<int>(adjacency_.rows()); }
    const Eigen::MatrixXd& adjacency() const { return adjacency_; }

    /// Fraction of nonzero entries of the adjacency (over all n^2 cells).
    double density() const;

private:
    Eigen::MatrixXd adjacency_;
};

/// Symmetric matrix of edge probabilities, entries in [0, 1].
class ProbabilityMatrix {
public:
    explicit ProbabilityMatrix(Eigen::MatrixXd values);

    int size() const { return static_cast<int>(values_.rows()); }
    const Eigen::MatrixXd& values() const { return values_; }

    /// Mean entry, i.e. n^-2 * sum of all probabilities.
    double mean() const { return values_.mean(); }

private:
    Eigen::MatrixXd values_;
};

/// Full parameter set of a nested block model: symmetric block-mean
/// matrix (communities x communities), per-node degree profiles (one
/// column per meta-community), and the two-level clustering.
///
/// Scaling convention: for every community k and meta-community l, the
/// profile entries of community k's members in column l sum to the size
/// of community k.
struct NbmParameters {
    Eigen::MatrixXd block_means;   // K x K, symmetric, entries in [0, 1]
    Eigen::MatrixXd profiles;      // n x L, nonnegative
    NodeClustering communities;    // n items -> K groups
    MetaClustering metas;          // K items -> L groups

    /// Throws ModelError when any invariant fails.
    void validate(double tol = 1e-9) const;
};

enum class ModelKind { sbm, dcbm, nbm, pabm };

const char* to_string(ModelKind kind);

/// Parse "sbm" / "dcbm" / "nbm" / "pabm" (case-insensitive).
ModelKind model_kind_from_string(const std::string& name);

} // namespace nbm
